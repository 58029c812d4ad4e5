#pragma once

#include <cstdint>
#include <vector>

#include "lfpp/params.hpp"

namespace lfpp {

// Closed integer interval [left, right]. Length is right - left; the number
// of lattice points is length + 1.
struct IntervalZ {
  std::int64_t left = 0;
  std::int64_t right = 0;
  std::int64_t length() const { return right - left; }
  std::int64_t points() const { return right - left + 1; }
  bool contains(std::int64_t x) const { return left <= x && x <= right; }
};

// Closed lattice rectangle [base.left, base.right] x [span.left, span.right].
struct RectRegion {
  IntervalZ base;
  IntervalZ span;
  std::int64_t width() const { return base.length(); }
  std::int64_t height() const { return span.length(); }
  std::int64_t point_count() const { return base.points() * span.points(); }
  bool contains(const RectRegion& o) const {
    return base.left <= o.base.left && o.base.right <= base.right &&
           span.left <= o.span.left && o.span.right <= span.right;
  }
};

// A piece of a self-similar partition of a real interval. depth counts scale
// steps below the root: a piece at depth q has length k * a_{l-q}. principal
// marks pieces whose entire ancestry consists of side (non-middle) segments.
struct RIntervalLabeled {
  double left = 0.0;
  double right = 0.0;
  int depth = 0;
  bool principal = false;
};

// Integer-snapped analogue used by coverings.
struct CoverPiece {
  IntervalZ iv;
  int depth = 0;
  bool principal = false;
};

// Partition of x + [0, k*a_l] obtained by recursively splitting every piece of
// length k*a_q with q > l-d into (k*a_{q-1}, k*a_{q-m-1}, k*a_{q-1}). All
// principal pieces end up with length exactly k*a_{l-d}. Pieces are returned
// left to right and tile the interval with disjoint interiors.
std::vector<RIntervalLabeled> partition(const ScaleParams& p, int l, double k,
                                        double x, int d);

// Integer covering of [x, x + floor(k*a_l)] derived from the partition. Side
// pieces are snapped so that the right piece of every split ends exactly at
// its parent's right endpoint (which makes left/right pairs exact mirrors);
// middle pieces start at the ceiling of the real split point. Adjacent pieces
// overlap in at most two lattice points. Every principal piece has exactly
// floor(k*a_{l-d}) + 1 points.
std::vector<CoverPiece> covering(const ScaleParams& p, int l, double k,
                                 std::int64_t x, int d);

// Same but keeping only the principal pieces.
std::vector<CoverPiece> covering_principal(const ScaleParams& p, int l, double k,
                                           std::int64_t x, int d);

}  // namespace lfpp
