#include "fdia/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fdia/rng.hpp"

namespace fdia {

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::deductive: return "deductive";
    case AttackKind::additive: return "additive";
    case AttackKind::combined: return "combined";
  }
  return "unknown";
}

AttackKind parse_attack_kind(const std::string& text) {
  if (text == "deductive") return AttackKind::deductive;
  if (text == "additive") return AttackKind::additive;
  if (text == "combined") return AttackKind::combined;
  throw std::invalid_argument("unknown attack kind '" + text + "'");
}

std::vector<Segment> place_segments(std::size_t series_length, std::size_t count,
                                    std::size_t length, std::uint64_t seed) {
  if (count == 0) return {};
  if (length == 0) throw std::invalid_argument("segment length must be positive");
  // Each segment reserves one trailing gap sample so neighbours never touch.
  const std::size_t needed = count * (length + 1) - 1;
  if (needed > series_length)
    throw std::invalid_argument("attack segments do not fit in the series");
  // Spread the free samples over count + 1 gaps (stars and bars).
  const std::size_t slack = series_length - needed;
  Rng rng(seed);
  std::vector<std::size_t> cuts(count);
  for (auto& c : cuts) c = static_cast<std::size_t>(rng.below(slack + 1));
  std::sort(cuts.begin(), cuts.end());
  std::vector<Segment> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = {cuts[k] + k * (length + 1), length};
  return out;
}

RandomPlacement placement_for_fraction(std::size_t series_length, double fraction,
                                       std::size_t count, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("attacked fraction must lie in (0, 1)");
  if (count == 0) throw std::invalid_argument("segment count must be positive");
  const auto total = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(series_length)));
  const std::size_t length = std::max<std::size_t>(1, total / count);
  return {count, length, seed};
}

std::vector<Segment> resolve_segments(const AttackSpec& spec, std::size_t length) {
  if (!(spec.magnitude > 0.0)) throw std::invalid_argument("attack magnitude must be positive");
  std::vector<Segment> segs = spec.segments;
  if (spec.placement) {
    auto placed = place_segments(length, spec.placement->segment_count,
                                 spec.placement->segment_length, spec.placement->seed);
    segs.insert(segs.end(), placed.begin(), placed.end());
  }
  std::sort(segs.begin(), segs.end(),
            [](const Segment& a, const Segment& b) { return a.start < b.start; });
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (segs[k].length == 0) throw std::invalid_argument("attack segment has zero length");
    if (segs[k].start + segs[k].length > length)
      throw std::invalid_argument("attack segment at " + std::to_string(segs[k].start) +
                                  " runs past the series end");
    if (k > 0 && segs[k - 1].start + segs[k - 1].length > segs[k].start)
      throw std::invalid_argument("attack segments overlap at " + std::to_string(segs[k].start));
  }
  return segs;
}

namespace {

enum class Direction { down, up };

// Applies the manipulation; `direction_of` maps the running attacked-point
// ordinal to additive or deductive.
template <typename DirectionOf>
AttackedSeries apply(const TimeSeries& series, const AttackSpec& spec, DirectionOf direction_of) {
  AttackedSeries out;
  out.spec = spec;
  out.segments = resolve_segments(spec, series.size());
  out.labels.assign(series.size(), false);
  std::vector<double> values = series.values;
  Rng draw(spec.draw_seed);
  std::size_t ordinal = 0;
  for (const auto& seg : out.segments) {
    for (std::size_t i = seg.start; i < seg.start + seg.length; ++i, ++ordinal) {
      double delta = spec.magnitude;
      // 1 - uniform() lies in (0, 1], so the draw never exceeds the bound.
      if (spec.per_point_draw) delta *= 1.0 - draw.uniform();
      const double x = series.values[i];
      const double change = delta * x;
      double y = direction_of(ordinal) == Direction::up ? x + change : x - change;
      // Rounding in x +- change can overshoot the bound by an ulp; step back.
      while (std::abs(y - x) > spec.magnitude * std::abs(x)) y = std::nextafter(y, x);
      values[i] = y;
      out.labels[i] = true;
    }
  }
  out.series = series.with_values(std::move(values));
  return out;
}

void require_kind(const AttackSpec& spec, AttackKind kind) {
  if (spec.kind != kind)
    throw std::invalid_argument("attack spec kind is " + to_string(spec.kind) + ", expected " +
                                to_string(kind));
}

}  // namespace

AttackedSeries inject_deductive(const TimeSeries& series, const AttackSpec& spec) {
  require_kind(spec, AttackKind::deductive);
  return apply(series, spec, [](std::size_t) { return Direction::down; });
}

AttackedSeries inject_additive(const TimeSeries& series, const AttackSpec& spec) {
  require_kind(spec, AttackKind::additive);
  return apply(series, spec, [](std::size_t) { return Direction::up; });
}

AttackedSeries inject_combined(const TimeSeries& series, const AttackSpec& spec) {
  require_kind(spec, AttackKind::combined);
  std::size_t total = 0;
  for (const auto& s : resolve_segments(spec, series.size())) total += s.length;
  // Earlier points (segment order) go additive; additive takes the odd one out.
  const std::size_t additive_count = (total + 1) / 2;
  return apply(series, spec, [additive_count](std::size_t ordinal) {
    return ordinal < additive_count ? Direction::up : Direction::down;
  });
}

AttackedSeries inject(const TimeSeries& series, const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::deductive: return inject_deductive(series, spec);
    case AttackKind::additive: return inject_additive(series, spec);
    case AttackKind::combined: return inject_combined(series, spec);
  }
  throw std::invalid_argument("unknown attack kind");
}

bool verify_stealth(const TimeSeries& source, const AttackedSeries& attacked) {
  if (source.size() != attacked.series.size() || attacked.labels.size() != source.size())
    throw std::invalid_argument("source and attacked series differ in length");
  const double bound = attacked.spec.magnitude;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double a = attacked.series.values[i];
    const double s = source.values[i];
    if (attacked.labels[i]) {
      if (!(std::abs(a - s) <= bound * std::abs(s))) return false;
    } else if (std::memcmp(&a, &s, sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace fdia
