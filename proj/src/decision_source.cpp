#include <algorithm>
#include <cmath>

#include "speechtree/augment.hpp"

namespace speechtree {

namespace {

// splitmix64 finalizer
std::uint64_t avalanche(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  return avalanche(state);
}

}  // namespace

DecisionSource DecisionSource::seeded(std::uint64_t seed, std::uint64_t epoch,
                                      std::uint64_t stream) {
  DecisionSource d;
  d.scripted_ = false;
  std::uint64_t s = 0x9E3779B97F4A7C15ull;
  s = avalanche(s ^ seed);
  s = avalanche(s ^ epoch);
  s = avalanche(s ^ stream);
  d.state_ = s;
  return d;
}

DecisionSource DecisionSource::scripted(std::vector<double> draws) {
  DecisionSource d;
  d.scripted_ = true;
  d.script_ = std::move(draws);
  return d;
}

double DecisionSource::next() {
  ++consumed_;
  if (scripted_) {
    if (script_pos_ >= script_.size()) throw ScriptExhausted();
    return script_[script_pos_++];
  }
  // 53 high bits -> [0,1)
  return static_cast<double>(splitmix64_next(state_) >> 11) * 0x1.0p-53;
}

std::size_t DecisionSource::pick_index(std::size_t n) {
  if (n == 0) throw std::logic_error("pick_index over empty range");
  auto idx = static_cast<std::size_t>(next() * static_cast<double>(n));
  return std::min(idx, n - 1);
}

int DecisionSource::pick_int(int lo, int hi) {
  if (lo > hi) throw std::logic_error("pick_int with inverted bounds");
  return lo + static_cast<int>(pick_index(static_cast<std::size_t>(hi - lo) + 1));
}

std::size_t DecisionSource::pick_weighted(std::span<const double> weights) {
  if (weights.empty()) throw std::logic_error("pick_weighted over empty weights");
  double u = next();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  return weights.size() - 1;
}

std::size_t DecisionSource::script_remaining() const {
  if (!scripted_) return 0;
  return script_.size() - script_pos_;
}

}  // namespace speechtree
