#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kaclab/son.hpp"

namespace kaclab {

/// Steps between polar re-orthonormalizations of a running walk.
inline constexpr std::int64_t kReorthoInterval = 10000;

struct Update {
  int plane = 1;       ///< 1-based plane index
  double theta = 0.0;  ///< angle in [0, 2pi)
};

struct UpdateSequence {
  int n = 2;
  std::vector<Update> items;

  std::size_t size() const { return items.size(); }
};

struct WalkState {
  Matrix X;
  std::int64_t t = 0;
  std::int64_t since_reortho = 0;

  static WalkState identity(int n);
  int n() const { return static_cast<int>(X.rows()); }
};

/// Draws one update: plane first, then angle, from the same stream.
Update random_update(int n, Rng& rng);

/// T i.i.d. updates with uniform plane and uniform angle.
UpdateSequence random_update_sequence(int n, std::int64_t horizon, Rng& rng);

/// Throws DomainError if any plane index or angle is invalid for seq.n.
void validate(const UpdateSequence& seq);

/// One in-place step X <- R(i, theta) X with periodic drift control.
void step(WalkState& state, const Update& u);

WalkState run_walk(WalkState state, const UpdateSequence& seq);

/// First column of X: the induced walk on the unit sphere.
Vector sphere_projection(const WalkState& state);

/// CSV with header "t,i,theta"; angles written with 17 significant digits.
void write_update_csv(std::ostream& out, const UpdateSequence& seq);
UpdateSequence read_update_csv(std::istream& in, int n);

}  // namespace kaclab
