#pragma once

#include <picheck/sos.hpp>

#include <utility>
#include <vector>

namespace picheck {

// Ordered pairs (left-process event, right-process event).
using EventRelation = std::vector<std::pair<Event, Event>>;

// Locations are independent when their parallel prefixes diverge.
bool struct_indep(const Location& u, const Location& v);
bool struct_indep(const LocationLabel& u, const LocationLabel& v);

// Structural independence, and no output alias is used by the other label.
bool event_indep(const Event& e, const Event& f);

bool indep_all(const Event& e, const std::vector<Event>& es);
bool dep_all(const Event& e, const std::vector<Event>& es);

std::vector<Event> domain_of(const EventRelation& s);
std::vector<Event> range_of(const EventRelation& s);

// True when the events of `es` are pairwise independent.
bool pairwise_independent(const std::vector<Event>& es);

}  // namespace picheck
