#pragma once

#include "mbill/dynamics.hpp"
#include "mbill/jet.hpp"

namespace mbill {

/// Taylor jets of (s1, u1) in (ds, du) around a base phase point.
struct MapJet {
  Jet2 s1;
  Jet2 u1;
  PhasePointSU base;
  PhasePointSU image;

  int degree() const noexcept { return s1.degree(); }
  /// Linear part; agrees with tangent_map_su at the base point.
  Mat2 linear() const noexcept { return {s1(1, 0), s1(0, 1), u1(1, 0), u1(0, 1)}; }
};

/// One-step jet of the billiard map at an arbitrary transversal phase point.
MapJet step_jet(const Billiard& billiard, const PhasePointSU& base, int degree = 3);

/// One-step jet at the first axis vertex of the 2-orbit.  Throws
/// SecondOrderNonzero when a quadratic coefficient exceeds 1e-7.
MapJet map_jet(const Billiard& billiard, int degree = 3);

/// Jet of the two-step map returning to the first axis vertex.
MapJet two_step_jet(const Billiard& billiard, int degree = 3);

/// second o first; second.base must be first.image.
MapJet compose_map_jets(const MapJet& first, const MapJet& second);

MapJet identity_jet(const PhasePointSU& base, int degree = 3);

}  // namespace mbill
