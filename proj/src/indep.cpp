#include <picheck/indep.hpp>

namespace picheck {

bool struct_indep(const Location& u, const Location& v) {
  std::size_t n = std::min(u.prefix.size(), v.prefix.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (u.prefix[i] != v.prefix[i]) return true;
  }
  return false;
}

bool struct_indep(const LocationLabel& u, const LocationLabel& v) {
  if (u.is_pair()) {
    LocationLabel first{u.first, std::nullopt}, second{*u.second, std::nullopt};
    return struct_indep(first, v) && struct_indep(second, v);
  }
  if (v.is_pair()) {
    return struct_indep(u.first, v.first) && struct_indep(u.first, *v.second);
  }
  return struct_indep(u.first, v.first);
}

namespace {

bool alias_fresh_for(const Alias& a, const ActionLabel& l) { return !free_aliases(l).count(a); }

}  // namespace

bool event_indep(const Event& e, const Event& f) {
  if (!struct_indep(e.location, f.location)) return false;
  if (e.action.kind == ActionLabel::Kind::output && !alias_fresh_for(e.action.alias, f.action)) {
    return false;
  }
  if (f.action.kind == ActionLabel::Kind::output && !alias_fresh_for(f.action.alias, e.action)) {
    return false;
  }
  return true;
}

bool indep_all(const Event& e, const std::vector<Event>& es) {
  for (const Event& f : es) {
    if (!event_indep(e, f)) return false;
  }
  return true;
}

bool dep_all(const Event& e, const std::vector<Event>& es) {
  for (const Event& f : es) {
    if (event_indep(e, f)) return false;
  }
  return true;
}

std::vector<Event> domain_of(const EventRelation& s) {
  std::vector<Event> out;
  for (const auto& [l, r] : s) out.push_back(l);
  return out;
}

std::vector<Event> range_of(const EventRelation& s) {
  std::vector<Event> out;
  for (const auto& [l, r] : s) out.push_back(r);
  return out;
}

bool pairwise_independent(const std::vector<Event>& es) {
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (std::size_t j = i + 1; j < es.size(); ++j) {
      if (!event_indep(es[i], es[j])) return false;
    }
  }
  return true;
}

}  // namespace picheck
