#include "scfgt/sparql.hpp"

#include <algorithm>

#include "scfgt/text.hpp"

namespace scfgt {

bool operator==(const SparqlQuery& a, const SparqlQuery& b) {
  if (a.form != b.form || a.projection != b.projection) return false;
  if (a.triples.size() != b.triples.size() || a.filters.size() != b.filters.size()) return false;
  for (std::size_t i = 0; i < a.triples.size(); ++i) {
    const auto& x = a.triples[i];
    const auto& y = b.triples[i];
    if (x.subject != y.subject || x.predicate != y.predicate || x.object != y.object)
      return false;
  }
  for (std::size_t i = 0; i < a.filters.size(); ++i)
    if (a.filters[i].left != b.filters[i].left || a.filters[i].right != b.filters[i].right)
      return false;
  return true;
}

namespace {

/// Whitespace tokenization with braces, parens and dots peeled off token
/// edges, so "{M0" and ")}" lex cleanly.
std::vector<std::string> lex_query(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& chunk : text::split_ws(s)) {
    std::size_t b = 0, e = chunk.size();
    std::vector<std::string> trail;
    auto isDelim = [](char c) { return c == '{' || c == '}' || c == '(' || c == ')'; };
    while (b < e && isDelim(chunk[b])) out.emplace_back(1, chunk[b++]);
    while (e > b && isDelim(chunk[e - 1])) trail.emplace_back(1, chunk[--e]);
    if (e > b) out.push_back(chunk.substr(b, e - b));
    out.insert(out.end(), trail.rbegin(), trail.rend());
  }
  return out;
}

[[noreturn]] void bad(const std::string& what, std::string_view query) {
  throw DataError("malformed query (" + what + "): " + std::string(query));
}

bool plausible_term(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (c == '{' || c == '}' || c == '(' || c == ')') return false;
  return t != "." && t != "FILTER";
}

SparqlQuery parse_items(const std::vector<std::vector<std::string>>& items,
                        SparqlQuery q, std::string_view original) {
  for (const auto& item : items) {
    if (item.empty()) bad("empty group between dots", original);
    if (item[0] == "FILTER") {
      if (item.size() != 6 || item[1] != "(" || item[3] != "!=" || item[5] != ")")
        bad("filter is not of the form FILTER ( a != b )", original);
      if (!plausible_term(item[2]) || !plausible_term(item[4]))
        bad("bad filter operand", original);
      q.filters.push_back({item[2], item[4]});
      continue;
    }
    if (item.size() < 3) bad("triple with fewer than three terms", original);
    Triple t;
    t.subject = item.front();
    t.object = item.back();
    std::vector<std::string> mid(item.begin() + 1, item.end() - 1);
    t.predicate = text::join(mid, " ");
    if (!plausible_term(t.subject) || !plausible_term(t.object))
      bad("bad triple term", original);
    for (const auto& m : mid)
      if (m != "," && m != "|" && !plausible_term(m)) bad("bad predicate term", original);
    q.triples.push_back(std::move(t));
  }
  return q;
}

}  // namespace

SparqlQuery parse_sparql(std::string_view query) {
  auto toks = lex_query(query);
  std::size_t i = 0;
  auto need = [&](const char* what) -> const std::string& {
    if (i >= toks.size()) bad(std::string("missing ") + what, query);
    return toks[i];
  };

  SparqlQuery q;
  if (need("query form") == "ASK") {
    q.form = SparqlQuery::Form::Ask;
    ++i;
  } else if (toks[i] == "SELECT") {
    ++i;
    if (need("DISTINCT") != "DISTINCT") bad("SELECT without DISTINCT", query);
    ++i;
    const std::string& v = need("projection variable");
    if (v.empty() || v[0] != '?') bad("projection is not a variable", query);
    q.form = SparqlQuery::Form::Select;
    q.projection = v;
    ++i;
  } else {
    bad("expected ASK or SELECT", query);
  }

  if (need("WHERE") != "WHERE") bad("missing WHERE", query);
  ++i;
  if (need("{") != "{") bad("missing {", query);
  ++i;

  std::vector<std::vector<std::string>> items;
  std::vector<std::string> current;
  bool closed = false;
  for (; i < toks.size(); ++i) {
    if (toks[i] == "}") {
      closed = true;
      ++i;
      break;
    }
    if (toks[i] == "{") bad("nested {", query);
    if (toks[i] == ".") {
      if (current.empty()) bad("empty group between dots", query);
      items.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(toks[i]);
  }
  if (!closed) bad("missing }", query);
  if (i != toks.size()) bad("trailing tokens after }", query);
  if (!current.empty()) items.push_back(std::move(current));

  return parse_items(items, std::move(q), query);
}

std::string serialize_sparql(const SparqlQuery& q) {
  std::string head = q.form == SparqlQuery::Form::Ask
                         ? "ASK"
                         : "SELECT DISTINCT " + q.projection;
  std::vector<std::string> items;
  for (const auto& t : q.triples)
    items.push_back(t.subject + " " + t.predicate + " " + t.object);
  for (const auto& f : q.filters)
    items.push_back("FILTER ( " + f.left + " != " + f.right + " )");
  if (items.empty()) return head + " WHERE { }";
  return head + " WHERE { " + text::join(items, " . ") + "}";
}

SparqlQuery ground_sparql(const SparqlQuery& q,
                          const std::map<std::string, std::string>& qids) {
  auto sub = [&](const std::string& term) -> std::string {
    if (term.size() == 2 && term[0] == 'M' && term[1] >= '0' && term[1] <= '9') {
      auto it = qids.find(term);
      if (it == qids.end()) throw DataError("unbound placeholder " + term);
      return "wd:" + it->second;
    }
    return term;
  };
  SparqlQuery out = q;
  for (auto& t : out.triples) {
    t.subject = sub(t.subject);
    t.object = sub(t.object);
  }
  for (auto& f : out.filters) {
    f.left = sub(f.left);
    f.right = sub(f.right);
  }
  return out;
}

std::string to_rir(const SparqlQuery& q) {
  std::string head = q.form == SparqlQuery::Form::Ask
                         ? "ASK"
                         : "SELECT DISTINCT " + q.projection;
  std::vector<std::string> items;
  for (const auto& t : q.triples)
    items.push_back("( " + t.subject + " ( " + t.predicate + " ) ( " + t.object + " ) )");
  for (const auto& f : q.filters)
    items.push_back("FILTER ( " + f.left + " != " + f.right + " )");
  if (items.empty()) return head + " WHERE lb rb";
  return head + " WHERE lb " + text::join(items, " . ") + " rb";
}

SparqlQuery from_rir(std::string_view rir) {
  auto toks = lex_query(rir);
  std::size_t i = 0;
  auto need = [&](const char* what) -> const std::string& {
    if (i >= toks.size()) bad(std::string("missing ") + what, rir);
    return toks[i];
  };

  SparqlQuery q;
  if (need("query form") == "ASK") {
    q.form = SparqlQuery::Form::Ask;
    ++i;
  } else if (toks[i] == "SELECT") {
    ++i;
    if (need("DISTINCT") != "DISTINCT") bad("SELECT without DISTINCT", rir);
    ++i;
    const std::string& v = need("projection variable");
    if (v.empty() || v[0] != '?') bad("projection is not a variable", rir);
    q.form = SparqlQuery::Form::Select;
    q.projection = v;
    ++i;
  } else {
    bad("expected ASK or SELECT", rir);
  }
  if (need("WHERE") != "WHERE") bad("missing WHERE", rir);
  ++i;
  if (need("lb") != "lb") bad("missing lb", rir);
  ++i;

  bool first = true;
  while (true) {
    if (need("rb") == "rb") {
      ++i;
      break;
    }
    if (!first) {
      if (toks[i] != ".") bad("missing dot between groups", rir);
      ++i;
    }
    first = false;
    if (need("group") == "FILTER") {
      ++i;
      if (need("(") != "(") bad("filter is not of the form FILTER ( a != b )", rir);
      ++i;
      std::string left = need("filter operand");
      ++i;
      if (need("!=") != "!=") bad("filter is not of the form FILTER ( a != b )", rir);
      ++i;
      std::string right = need("filter operand");
      ++i;
      if (need(")") != ")") bad("filter is not of the form FILTER ( a != b )", rir);
      ++i;
      if (!plausible_term(left) || !plausible_term(right)) bad("bad filter operand", rir);
      q.filters.push_back({std::move(left), std::move(right)});
      continue;
    }
    if (toks[i] != "(") bad("expected ( to open a triple", rir);
    ++i;
    Triple t;
    t.subject = need("triple subject");
    if (!plausible_term(t.subject)) bad("bad triple term", rir);
    ++i;
    if (need("(") != "(") bad("expected ( before predicate", rir);
    ++i;
    std::vector<std::string> mid;
    while (need("predicate") != ")") {
      if (toks[i] == "(" || toks[i] == "lb" || toks[i] == "rb")
        bad("unbalanced parens in predicate", rir);
      mid.push_back(toks[i]);
      ++i;
    }
    ++i;
    if (mid.empty()) bad("empty predicate", rir);
    for (const auto& m : mid)
      if (m != "," && m != "|" && !plausible_term(m)) bad("bad predicate term", rir);
    t.predicate = text::join(mid, " ");
    if (need("(") != "(") bad("expected ( before object", rir);
    ++i;
    t.object = need("triple object");
    if (!plausible_term(t.object)) bad("bad triple term", rir);
    ++i;
    if (need(")") != ")") bad("expected ) after object", rir);
    ++i;
    if (need(")") != ")") bad("expected ) to close the triple", rir);
    ++i;
    q.triples.push_back(std::move(t));
  }
  if (i != toks.size()) bad("trailing tokens after rb", rir);
  return q;
}

}  // namespace scfgt
