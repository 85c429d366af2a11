#include "kaclab/walk.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "kaclab/errors.hpp"

namespace kaclab {

WalkState WalkState::identity(int n) {
  require(n >= 2, "walk dimension must be at least 2");
  return WalkState{Matrix::Identity(n, n), 0, 0};
}

Update random_update(int n, Rng& rng) {
  Update u;
  u.plane = rng.uniform_int(1, plane_count(n));
  u.theta = rng.angle();
  return u;
}

UpdateSequence random_update_sequence(int n, std::int64_t horizon, Rng& rng) {
  require(n >= 2, "walk dimension must be at least 2");
  require(horizon >= 0, "horizon must be non-negative");
  UpdateSequence seq;
  seq.n = n;
  seq.items.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 0; t < horizon; ++t) seq.items.push_back(random_update(n, rng));
  return seq;
}

void validate(const UpdateSequence& seq) {
  require(seq.n >= 2, "update sequence dimension must be at least 2");
  const int planes = plane_count(seq.n);
  for (const Update& u : seq.items) {
    require(u.plane >= 1 && u.plane <= planes, "update plane index out of range");
    require(u.theta >= 0.0 && u.theta < kTwoPi, "update angle outside [0, 2pi)");
  }
}

void step(WalkState& state, const Update& u) {
  apply_rotation_left(state.X, u.plane, u.theta);
  ++state.t;
  if (++state.since_reortho >= kReorthoInterval) {
    state.X = reorthonormalize(state.X);
    state.since_reortho = 0;
  }
}

WalkState run_walk(WalkState state, const UpdateSequence& seq) {
  require(state.X.rows() == seq.n && state.X.cols() == seq.n,
          "run_walk: state and update sequence dimensions differ");
  for (const Update& u : seq.items) step(state, u);
  return state;
}

Vector sphere_projection(const WalkState& state) { return state.X.col(0); }

void write_update_csv(std::ostream& out, const UpdateSequence& seq) {
  out << "t,i,theta\n";
  char buf[64];
  for (std::size_t t = 0; t < seq.items.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", seq.items[t].theta);
    out << t << ',' << seq.items[t].plane << ',' << buf << '\n';
  }
}

UpdateSequence read_update_csv(std::istream& in, int n) {
  UpdateSequence seq;
  seq.n = n;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == "t,i,theta",
          "update CSV: missing header");
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_s, i_s, th_s;
    require(std::getline(row, t_s, ',') && std::getline(row, i_s, ',') && std::getline(row, th_s),
            "update CSV: malformed row '" + line + "'");
    require(std::stoull(t_s) == expected, "update CSV: rows out of order");
    seq.items.push_back(Update{std::stoi(i_s), std::stod(th_s)});
    ++expected;
  }
  validate(seq);
  return seq;
}

}  // namespace kaclab
