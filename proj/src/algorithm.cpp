#include "tddr/algorithm.hpp"

#include <stdexcept>
#include <string>

#include "tddr/errors.hpp"
#include "tddr/td_targets.hpp"

namespace tddr {

namespace {

struct AlgoInfo {
  Algorithm id;
  std::string_view name;
};

constexpr AlgoInfo kAlgorithms[] = {
    {Algorithm::DDPG, "ddpg"},     {Algorithm::TD3, "td3"},       {Algorithm::TDDR, "tddr"},
    {Algorithm::DADC, "dadc"},     {Algorithm::DASC, "dasc"},     {Algorithm::SASC, "sasc"},
    {Algorithm::DADC_R, "dadc_r"}, {Algorithm::DASC_R, "dasc_r"}, {Algorithm::SASC_R, "sasc_r"},
};

}  // namespace

double psi_for(Algorithm a, const TdContext& ctx) {
  switch (a) {
    case Algorithm::TDDR:
      return psi_tddr(ctx);
    case Algorithm::DADC:
    case Algorithm::DADC_R:
      return psi_dadc(ctx);
    case Algorithm::DASC:
    case Algorithm::DASC_R:
      return psi_dasc(ctx);
    case Algorithm::SASC:
    case Algorithm::SASC_R:
      return psi_sasc(ctx);
    default:
      throw std::logic_error("psi_for: not a double-actor algorithm");
  }
}

std::string_view algorithm_name(Algorithm a) {
  for (const auto& info : kAlgorithms)
    if (info.id == a) return info.name;
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& info : kAlgorithms)
    if (info.name == name) return info.id;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

bool has_double_actor(Algorithm a) { return a != Algorithm::DDPG && a != Algorithm::TD3; }

bool has_representation(Algorithm a) {
  return a == Algorithm::DADC_R || a == Algorithm::DASC_R || a == Algorithm::SASC_R;
}

std::size_t critic_count(Algorithm a) { return a == Algorithm::DDPG ? 1 : 2; }

}  // namespace tddr
