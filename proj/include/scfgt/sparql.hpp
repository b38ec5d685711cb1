#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scfgt/errors.hpp"

namespace scfgt {

/// The query fragment used by the datasets: ASK or single-variable
/// SELECT DISTINCT, a conjunction of triples, and inequality filters.
/// Predicates may be unions or property paths and are kept as written.
struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
};

struct FilterNotEqual {
  std::string left;
  std::string right;
};

struct SparqlQuery {
  enum class Form { Ask, Select };
  Form form = Form::Ask;
  std::string projection;  // Select only, e.g. "?x0"
  std::vector<Triple> triples;
  std::vector<FilterNotEqual> filters;
};

bool operator==(const SparqlQuery& a, const SparqlQuery& b);

/// Throws DataError on anything outside the fragment.
SparqlQuery parse_sparql(std::string_view query);

/// Canonical single-line form; parse_sparql(serialize_sparql(q)) == q.
std::string serialize_sparql(const SparqlQuery& q);

/// Replaces M<digit> placeholder terms with wd:<qid> using the given map;
/// an unmapped placeholder is an error. Triple count never changes.
SparqlQuery ground_sparql(const SparqlQuery& q, const std::map<std::string, std::string>& qids);

/// Reversible intermediate representation: braces become lb/rb and each
/// triple is parenthesized as "( s ( p ) ( o ) )" so that token order
/// survives round trips through sequence models.
std::string to_rir(const SparqlQuery& q);
SparqlQuery from_rir(std::string_view rir);

}  // namespace scfgt
