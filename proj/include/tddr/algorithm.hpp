#pragma once

#include <cstddef>
#include <string_view>

namespace tddr {

enum class Algorithm { DDPG, TD3, TDDR, DADC, DASC, SASC, DADC_R, DASC_R, SASC_R };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);  // throws ConfigError

bool has_double_actor(Algorithm a);
bool has_representation(Algorithm a);
std::size_t critic_count(Algorithm a);

struct TdContext;
// Next-state value for a double-actor algorithm; throws std::logic_error for
// DDPG and TD3, which build psi from a single actor.
double psi_for(Algorithm a, const TdContext& ctx);

}  // namespace tddr
