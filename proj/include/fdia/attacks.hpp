#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdia/timeseries.hpp"

namespace fdia {

enum class AttackKind { deductive, additive, combined };

std::string to_string(AttackKind kind);
AttackKind parse_attack_kind(const std::string& text);

/// Contiguous run of manipulated samples.
struct Segment {
  std::size_t start = 0;
  std::size_t length = 0;
  bool operator==(const Segment&) const = default;
};

/// Random non-overlapping placement, resolved against a concrete series length.
struct RandomPlacement {
  std::size_t segment_count = 4;
  std::size_t segment_length = 25;
  std::uint64_t seed = 0;
};

struct AttackSpec {
  AttackKind kind = AttackKind::combined;
  /// Relative manipulation size; 0.05 is the stealth bound.
  double magnitude = 0.05;
  std::vector<Segment> segments;
  std::optional<RandomPlacement> placement;
  /// Draw each point's change uniformly in (0, magnitude] instead of using the
  /// constant magnitude.
  bool per_point_draw = false;
  std::uint64_t draw_seed = 0;
};

/// Manipulated series plus ground truth. `magnitude` is the bound the attack
/// promised to respect.
struct AttackedSeries {
  TimeSeries series;
  std::vector<bool> labels;
  AttackSpec spec;
  std::vector<Segment> segments;
};

/// Segments of `spec` resolved for a series of the given length (explicit
/// segments, or a seeded random layout), sorted by start. Throws on overlap or
/// out-of-range segments.
std::vector<Segment> resolve_segments(const AttackSpec& spec, std::size_t length);

/// Random layout of `count` segments of `length` samples that neither overlap
/// nor touch. Deterministic for a fixed seed.
std::vector<Segment> place_segments(std::size_t series_length, std::size_t count,
                                    std::size_t length, std::uint64_t seed);

/// Placement covering `fraction` of `series_length` with `count` equal segments.
RandomPlacement placement_for_fraction(std::size_t series_length, double fraction,
                                       std::size_t count, std::uint64_t seed);

AttackedSeries inject_deductive(const TimeSeries& series, const AttackSpec& spec);
AttackedSeries inject_additive(const TimeSeries& series, const AttackSpec& spec);
AttackedSeries inject_combined(const TimeSeries& series, const AttackSpec& spec);
/// Dispatches on spec.kind.
AttackedSeries inject(const TimeSeries& series, const AttackSpec& spec);

/// True iff every labelled point moved by at most magnitude * |source| and
/// every unlabelled point is bit-identical to the source.
bool verify_stealth(const TimeSeries& source, const AttackedSeries& attacked);

}  // namespace fdia
