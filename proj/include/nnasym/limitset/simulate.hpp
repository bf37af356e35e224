// Copyright 2026 The nnasym Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Draws of sup_{d in D} W(d)^2 for the centered Gaussian process W with
// covariance E[W(d1) W(d2)] = E_Q[d1 d2].
//
// Every admissible direction is a coefficient vector v over a fixed basis with
// Gram G, and W(v / |v|) = v'Z / sqrt(v'Gv) with Z ~ N(0, G). The index set is
// a union of pieces, one per partition of the hidden units:
//
//   span S (free linear coefficients) + second-order cones + free-unit cone.
//
// For a piece the supremum splits into the closed form Z_S' G_SS^-1 Z_S plus
// the supremum of (c'z)^2 / (c'Rc) over the remaining cone, where z and R are
// the residuals of Z and G after projecting out S. On a cone that supremum is
// max over +-z of  max_c 2c'z - c'Rc, solved here by multistart projected
// ascent over raw second-order factors and non-negative free-unit weights.

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "nnasym/errors.hpp"
#include "nnasym/io.hpp"
#include "nnasym/limitset/basis.hpp"
#include "nnasym/limitset/partitions.hpp"
#include "nnasym/parallel.hpp"
#include "nnasym/rng.hpp"

namespace nnasym {

/// Second-order cone of one true unit: {x~' M x~ phi''(z_i) : M psd, rank M <= rank}.
struct QuadBlock {
  std::size_t unit = 0;
  std::size_t rank = 1;
  std::size_t order = 2;  // d + 1
  std::vector<std::array<std::size_t, 2>> entries;  // (j, l), j <= l, of M
  std::vector<std::size_t> tags;                    // basis index per entry
};

struct SupPiece {
  std::string label;
  std::vector<std::size_t> span;  // basis indices with unrestricted coefficients
  std::vector<QuadBlock> quad;
  std::size_t n_free = 0;         // free units, each choosing one grid function
  std::vector<std::size_t> grid;  // basis indices of admissible free-unit functions
};

struct SupSettings {
  std::size_t starts = 16;
  std::size_t iters = 200;
  double eig_floor = 1e-10;
  double resid_floor = 1e-8;  // grid functions with smaller residual variance are skipped
  unsigned threads = 1;
};

/// Realized draws of sup W^2.
struct SupSample {
  std::vector<double> values;
  std::size_t draws = 0;
  std::string grid_spec;
};

inline std::string sup_to_csv(const SupSample& s) {
  std::string out = "draw,sup_w2\n";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += io::format_double(s.values[i]);
    out += '\n';
  }
  return out;
}

inline SupSample sup_from_csv(std::string_view text) {
  SupSample s;
  bool header = true;
  std::size_t row = 0;
  for (auto line : io::split(text, '\n')) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "draw,sup_w2") throw InvalidInput("limit CSV header must be draw,sup_w2");
      header = false;
      continue;
    }
    const auto cells = io::split(line, ',');
    if (cells.size() != 2) throw InvalidInput("limit CSV row " + std::to_string(row) + " must have 2 fields");
    s.values.push_back(io::parse_double(cells[1]));
  }
  if (header) throw InvalidInput("limit CSV is empty");
  s.draws = s.values.size();
  return s;
}

/// Quadratic block for true unit `unit` over the basis' second-order tags.
inline QuadBlock make_quad_block(const GramBasis& basis, std::size_t unit, std::size_t d, std::size_t rank) {
  using K = BasisTag::Kind;
  QuadBlock blk;
  blk.unit = unit;
  blk.order = d + 1;
  blk.rank = std::min(rank, d + 1);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto& t = basis.tags[a];
    if (t.unit != unit || !t.is_second_order()) continue;
    if (t.kind == K::XXPhi2) blk.entries.push_back({t.j, t.l});
    else if (t.kind == K::XPhi2) blk.entries.push_back({t.j, d});
    else blk.entries.push_back({d, d});
    blk.tags.push_back(a);
  }
  if (blk.entries.size() != (d + 1) * (d + 2) / 2)
    throw InvalidInput("basis lacks second-order tags for true unit " + std::to_string(unit + 1));
  return blk;
}

/// Pieces of the index set for k hidden units around a k0-unit truth. Pieces
/// contained in another piece (fewer second-order ranks and free units) are
/// dropped; `labels` receives every partition they stand for.
inline std::vector<SupPiece> pieces_for(const GramBasis& basis, std::size_t k, std::size_t k0, std::size_t d,
                                        std::vector<std::string>* labels = nullptr) {
  const auto span = basis.indices_where([](const BasisTag& t) { return !t.is_free() && !t.is_second_order(); });
  const auto grid = basis.indices_where([](const BasisTag& t) { return t.is_free(); });
  struct Shape {
    std::vector<std::size_t> ranks;
    std::size_t n_free;
    std::string label;
  };
  std::vector<Shape> shapes;
  for (const auto& part : enumerate_partitions(k, k0)) {
    Shape s;
    s.ranks.resize(k0);
    for (std::size_t i = 0; i < k0; ++i) s.ranks[i] = std::min(part.class_size(i) - 1, d + 1);
    s.n_free = part.count(UnitRole::Free);
    s.label = part.describe();
    if (labels) labels->push_back(s.label);
    shapes.push_back(std::move(s));
  }
  auto contains = [](const Shape& big, const Shape& small) {
    if (big.n_free < small.n_free) return false;
    for (std::size_t i = 0; i < big.ranks.size(); ++i)
      if (big.ranks[i] < small.ranks[i]) return false;
    return true;
  };
  std::vector<SupPiece> out;
  for (std::size_t a = 0; a < shapes.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < shapes.size() && !dominated; ++b) {
      if (a == b || !contains(shapes[b], shapes[a])) continue;
      // Strictly larger, or equal with an earlier representative.
      dominated = !contains(shapes[a], shapes[b]) || b < a;
    }
    if (dominated) continue;
    SupPiece piece;
    piece.label = shapes[a].label;
    piece.span = span;
    for (std::size_t i = 0; i < k0; ++i)
      if (shapes[a].ranks[i] > 0) piece.quad.push_back(make_quad_block(basis, i, d, shapes[a].ranks[i]));
    piece.n_free = shapes[a].n_free;
    if (piece.n_free > 0) {
      if (grid.empty()) throw InvalidInput("partition has free units but the basis has no grid functions");
      piece.grid = grid;
    }
    out.push_back(std::move(piece));
  }
  return out;
}

class SupSimulator {
 public:
  struct Prepared {
    SupPiece piece;
    std::vector<std::size_t> resid;                   // quad tags, then usable grid tags
    std::vector<std::vector<std::size_t>> block_pos;  // per block: position in resid of each entry
    std::size_t grid_begin = 0;                       // first grid position in resid
    Eigen::LLT<Matrix> span_llt;
    Matrix reduce;  // resid x span: G_RS G_SS^-1
    Matrix R;       // residual Gram
  };

  SupSimulator(const GramBasis& basis, std::vector<SupPiece> pieces, SupSettings settings = {})
      : settings_(settings) {
    const auto p = static_cast<Eigen::Index>(basis.size());
    if (p == 0) throw InvalidInput("empty basis");
    Eigen::SelfAdjointEigenSolver<Matrix> es(basis.gram);
    if (es.info() != Eigen::Success) throw PipelineError("Gram eigendecomposition failed");
    Vector lam = es.eigenvalues();
    for (Eigen::Index e = 0; e < p; ++e) {
      if (lam[e] < -1e-10) negative_eigs_ += 1;
      if (lam[e] < settings_.eig_floor) {
        lam[e] = settings_.eig_floor;
        floor_events_ += 1;
      }
    }
    factor_ = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    gram_ = factor_ * factor_.transpose();
    for (auto& piece : pieces) prepared_.push_back(prepare(std::move(piece)));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(gram_.rows()); }
  std::size_t floor_events() const noexcept { return floor_events_; }
  std::size_t negative_eigenvalues() const noexcept { return negative_eigs_; }
  const Matrix& floored_gram() const noexcept { return gram_; }
  const std::vector<Prepared>& pieces() const noexcept { return prepared_; }

  /// Z ~ N(0, G_floored).
  Vector draw_gaussian(Stream& s) const {
    Vector xi(gram_.rows());
    for (Eigen::Index e = 0; e < xi.size(); ++e) xi[e] = s.normal();
    return factor_ * xi;
  }

  /// sup over all pieces for one Gaussian draw; `search` seeds the multistart.
  double evaluate(const Vector& Z, Stream search) const {
    double best = 0.0;
    for (std::size_t i = 0; i < prepared_.size(); ++i) {
      Stream s = search.substream(i, Purpose::LimitSearch);
      best = std::max(best, evaluate_piece(prepared_[i], Z, s));
    }
    return best;
  }

  double evaluate_piece(const Prepared& pp, const Vector& Z, Stream& search) const {
    double base = 0.0;
    Vector zs;
    if (!pp.piece.span.empty()) {
      zs = gather(Z, pp.piece.span);
      base = zs.dot(pp.span_llt.solve(zs));
    }
    if (pp.resid.empty()) return base;
    Vector z = gather(Z, pp.resid);
    if (!pp.piece.span.empty()) z -= pp.reduce * zs;
    double extra = 0.0;
    for (double sign : {1.0, -1.0}) extra = std::max(extra, cone_sup(pp, sign * z, search));
    return base + extra;
  }

  /// Draws `draws` values; draw i uses substreams i of `stream`.
  SupSample run(std::size_t draws, Stream stream) const {
    SupSample out;
    out.draws = draws;
    out.values.assign(draws, 0.0);
    parallel_for(draws, settings_.threads, [&](std::size_t i) {
      Stream zs = stream.substream(i, Purpose::LimitDraw);
      const Vector Z = draw_gaussian(zs);
      out.values[i] = evaluate(Z, stream.substream(i, Purpose::LimitSearch));
    });
    return out;
  }

 private:
  static Vector gather(const Vector& v, const std::vector<std::size_t>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
    return out;
  }

  Matrix sub(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            gram_(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    return out;
  }

  Prepared prepare(SupPiece piece) const {
    Prepared pp;
    for (auto a : piece.span)
      if (a >= dim()) throw InvalidInput("piece references a basis index out of range");
    if (!piece.span.empty()) {
      pp.span_llt.compute(sub(piece.span, piece.span));
      if (pp.span_llt.info() != Eigen::Success) throw PipelineError("span Gram factorization failed");
    }
    for (const auto& blk : piece.quad) {
      std::vector<std::size_t> pos;
      for (auto a : blk.tags) {
        pos.push_back(pp.resid.size());
        pp.resid.push_back(a);
      }
      pp.block_pos.push_back(std::move(pos));
    }
    pp.grid_begin = pp.resid.size();
    std::vector<std::size_t> candidates = pp.resid;
    for (auto a : piece.grid) candidates.push_back(a);
    if (!candidates.empty()) {
      Matrix R = sub(candidates, candidates);
      Matrix reduce;
      if (!piece.span.empty()) {
        const Matrix grs = sub(candidates, piece.span);
        reduce = pp.span_llt.solve(grs.transpose()).transpose();
        R -= reduce * grs.transpose();
      }
      // Keep quad tags; keep grid functions that are not (numerically) in the span.
      std::vector<Eigen::Index> keep;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        if (c < pp.grid_begin || R(ci, ci) > settings_.resid_floor * gram_(static_cast<Eigen::Index>(candidates[c]),
                                                                          static_cast<Eigen::Index>(candidates[c])))
          keep.push_back(ci);
      }
      pp.resid.clear();
      for (auto c : keep) pp.resid.push_back(candidates[static_cast<std::size_t>(c)]);
      const auto nk = static_cast<Eigen::Index>(keep.size());
      pp.R.resize(nk, nk);
      for (Eigen::Index r = 0; r < nk; ++r)
        for (Eigen::Index c = 0; c < nk; ++c) pp.R(r, c) = R(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(c)]);
      if (!piece.span.empty()) {
        pp.reduce.resize(nk, reduce.cols());
        for (Eigen::Index r = 0; r < nk; ++r) pp.reduce.row(r) = reduce.row(keep[static_cast<std::size_t>(r)]);
      }
    }
    pp.piece = std::move(piece);
    return pp;
  }

  // ---- residual cone problem ---------------------------------------------

  struct State {
    std::vector<Matrix> V;                // per block (order x rank)
    std::vector<std::size_t> support;     // grid positions in resid
    std::vector<double> mu;               // weights on support
  };

  static Vector coefficients(const Prepared& pp, const State& st) {
    Vector c = Vector::Zero(static_cast<Eigen::Index>(pp.resid.size()));
    for (std::size_t b = 0; b < pp.piece.quad.size(); ++b) {
      const Matrix M = st.V[b] * st.V[b].transpose();
      const auto& blk = pp.piece.quad[b];
      for (std::size_t e = 0; e < blk.entries.size(); ++e) {
        const auto [j, l] = blk.entries[e];
        c[static_cast<Eigen::Index>(pp.block_pos[b][e])] =
            (j == l ? 1.0 : 2.0) * M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
      }
    }
    for (std::size_t s = 0; s < st.support.size(); ++s) c[static_cast<Eigen::Index>(st.support[s])] += st.mu[s];
    return c;
  }

  static double objective(const Prepared& pp, const Vector& c, const Vector& z) {
    return 2.0 * c.dot(z) - c.dot(pp.R * c);
  }

  static double ratio(const Prepared& pp, const Vector& c, const Vector& z) {
    const double num = c.dot(z);
    const double den = c.dot(pp.R * c);
    if (!(num > 0.0) || !(den > 0.0)) return 0.0;
    return num * num / den;
  }

  /// Optimal rescaling c -> tau c (V -> sqrt(tau) V, mu -> tau mu).
  static void rescale(const Prepared& pp, State& st, const Vector& z) {
    const Vector c = coefficients(pp, st);
    const double num = c.dot(z), den = c.dot(pp.R * c);
    if (!(num > 0.0) || !(den > 0.0)) return;
    const double tau = num / den;
    for (auto& V : st.V) V *= std::sqrt(tau);
    for (auto& m : st.mu) m *= tau;
  }

  /// Exact best cone value over a small set of generators (all subsets).
  double small_cone(const Prepared& pp, const std::vector<std::size_t>& gens, const Vector& z,
                    std::vector<double>* weights = nullptr) const {
    const std::size_t m = gens.size();
    double best = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
      std::vector<std::size_t> sel;
      for (std::size_t g = 0; g < m; ++g)
        if (mask & (std::size_t{1} << g)) sel.push_back(g);
      const auto s = static_cast<Eigen::Index>(sel.size());
      Matrix R(s, s);
      Vector zz(s);
      for (Eigen::Index a = 0; a < s; ++a) {
        zz[a] = z[static_cast<Eigen::Index>(gens[sel[static_cast<std::size_t>(a)]])];
        for (Eigen::Index b = 0; b < s; ++b)
          R(a, b) = pp.R(static_cast<Eigen::Index>(gens[sel[static_cast<std::size_t>(a)]]),
                         static_cast<Eigen::Index>(gens[sel[static_cast<std::size_t>(b)]]));
      }
      Eigen::LDLT<Matrix> ldlt(R);
      if (ldlt.info() != Eigen::Success) continue;
      const Vector mu = ldlt.solve(zz);
      if (!mu.allFinite() || mu.minCoeff() < 0.0) continue;
      const double val = zz.dot(mu);
      if (val > best) {
        best = val;
        if (weights) {
          weights->assign(m, 0.0);
          for (Eigen::Index a = 0; a < s; ++a) (*weights)[sel[static_cast<std::size_t>(a)]] = mu[a];
        }
      }
    }
    return best;
  }

  /// Greedy forward selection of up to n_free grid generators given a fixed
  /// base coefficient vector c0 (zero for the free-only problem).
  void grow_support(const Prepared& pp, State& st, const Vector& z) const {
    while (st.support.size() < pp.piece.n_free) {
      const Vector c = coefficients(pp, st);
      const Vector g = z - pp.R * c;
      double best_gain = 0.0;
      std::size_t best_pos = pp.resid.size();
      for (std::size_t pos = pp.grid_begin; pos < pp.resid.size(); ++pos) {
        if (std::find(st.support.begin(), st.support.end(), pos) != st.support.end()) continue;
        const auto pi = static_cast<Eigen::Index>(pos);
        const double gp = g[pi];
        if (gp <= 0.0) continue;
        const double gain = gp * gp / pp.R(pi, pi);
        if (gain > best_gain) {
          best_gain = gain;
          best_pos = pos;
        }
      }
      if (best_pos == pp.resid.size()) return;
      st.support.push_back(best_pos);
      st.mu.push_back(g[static_cast<Eigen::Index>(best_pos)] / pp.R(static_cast<Eigen::Index>(best_pos), static_cast<Eigen::Index>(best_pos)));
    }
  }

  double free_only(const Prepared& pp, const Vector& z) const {
    if (pp.piece.n_free == 0 || pp.grid_begin == pp.resid.size()) return 0.0;
    if (pp.piece.n_free == 1) {
      double best = 0.0;
      for (std::size_t pos = pp.grid_begin; pos < pp.resid.size(); ++pos) {
        const auto pi = static_cast<Eigen::Index>(pos);
        if (z[pi] > 0.0) best = std::max(best, z[pi] * z[pi] / pp.R(pi, pi));
      }
      return best;
    }
    State st;
    grow_support(pp, st, z);
    return small_cone(pp, st.support, z);
  }

  /// Projected gradient ascent on F(c(V, mu)) = 2c'z - c'Rc.
  void ascend(const Prepared& pp, State& st, const Vector& z, std::size_t iters) const {
    double step = 1.0;
    Vector c = coefficients(pp, st);
    double F = objective(pp, c, z);
    int flat = 0;
    for (std::size_t it = 0; it < iters && flat < 5; ++it) {
      const Vector gc = 2.0 * (z - pp.R * c);
      std::vector<Matrix> gV(st.V.size());
      double gnorm2 = 0.0;
      for (std::size_t b = 0; b < st.V.size(); ++b) {
        const auto& blk = pp.piece.quad[b];
        Matrix H = Matrix::Zero(static_cast<Eigen::Index>(blk.order), static_cast<Eigen::Index>(blk.order));
        for (std::size_t e = 0; e < blk.entries.size(); ++e) {
          const auto j = static_cast<Eigen::Index>(blk.entries[e][0]);
          const auto l = static_cast<Eigen::Index>(blk.entries[e][1]);
          const double g = gc[static_cast<Eigen::Index>(pp.block_pos[b][e])];
          H(j, l) = g;
          H(l, j) = g;
        }
        gV[b] = 2.0 * H * st.V[b];
        gnorm2 += gV[b].squaredNorm();
      }
      std::vector<double> gmu(st.mu.size());
      for (std::size_t s = 0; s < st.mu.size(); ++s) {
        gmu[s] = gc[static_cast<Eigen::Index>(st.support[s])];
        if (st.mu[s] > 0.0 || gmu[s] > 0.0) gnorm2 += gmu[s] * gmu[s];
      }
      if (gnorm2 <= 1e-30) break;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        State trial = st;
        for (std::size_t b = 0; b < st.V.size(); ++b) trial.V[b] += step * gV[b];
        for (std::size_t s = 0; s < st.mu.size(); ++s) trial.mu[s] = std::max(0.0, st.mu[s] + step * gmu[s]);
        rescale(pp, trial, z);
        const Vector ct = coefficients(pp, trial);
        const double Ft = objective(pp, ct, z);
        if (Ft >= F + 1e-4 * step * gnorm2 || (Ft > F && ls > 30)) {
          flat = (Ft - F) <= 1e-12 * (1.0 + std::abs(F)) ? flat + 1 : 0;
          st = std::move(trial);
          c = ct;
          F = Ft;
          step *= 2.0;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
  }

  double cone_sup(const Prepared& pp, const Vector& z, Stream& search) const {
    const bool has_quad = !pp.piece.quad.empty();
    double best = free_only(pp, z);
    if (!has_quad) return best;
    for (std::size_t s = 0; s < settings_.starts; ++s) {
      State st;
      for (const auto& blk : pp.piece.quad) {
        Matrix V(static_cast<Eigen::Index>(blk.order), static_cast<Eigen::Index>(blk.rank));
        for (Eigen::Index e = 0; e < V.size(); ++e) V.data()[e] = search.normal();
        st.V.push_back(std::move(V));
      }
      rescale(pp, st, z);
      if (pp.piece.n_free == 0) {
        ascend(pp, st, z, settings_.iters);
      } else {
        ascend(pp, st, z, settings_.iters / 2);
        grow_support(pp, st, z);
        ascend(pp, st, z, settings_.iters - settings_.iters / 2);
      }
      best = std::max(best, ratio(pp, coefficients(pp, st), z));
    }
    return best;
  }

  SupSettings settings_;
  Matrix factor_;
  Matrix gram_;
  std::size_t floor_events_ = 0;
  std::size_t negative_eigs_ = 0;
  std::vector<Prepared> prepared_;
};

/// Simulates sup W^2 over the full index set for k hidden units around
/// `truth`, with free units restricted to `grid`.
inline SupSample simulate_sup_w2(const MlpParams& truth, std::size_t k,
                                 const std::vector<std::pair<Vector, double>>& grid, std::size_t draws,
                                 const SupSettings& settings, Stream stream, const Matrix& quad,
                                 const BasisOptions& basis_opt = {}, const TransferFunction& tf = tanh_transfer()) {
  if (draws == 0) throw InvalidInput("simulate_sup_w2 needs draws >= 1");
  const GramBasis basis = build_joint_basis(truth, k, grid, quad, basis_opt, tf);
  SupSimulator sim(basis, pieces_for(basis, k, truth.k(), truth.d()), settings);
  SupSample out = sim.run(draws, stream);
  out.grid_spec = std::to_string(grid.size()) + " grid points";
  return out;
}

/// Structured description of a basis and its simulator.
inline nlohmann::json basis_manifest(const GramBasis& basis, const SupSimulator& sim,
                                     const std::vector<std::string>& partition_labels, const std::string& grid_spec) {
  nlohmann::json j;
  nlohmann::json tags = nlohmann::json::array();
  for (const auto& t : basis.tags) tags.push_back(t.label());
  j["tags"] = tags;
  j["basis_size"] = basis.size();
  j["quad_size"] = basis.quad_size;
  j["gram_min_eig"] = basis.min_eig;
  j["gram_max_eig"] = basis.max_eig;
  j["smooth_min_eig"] = basis.smooth_min_eig;
  j["floor_events"] = sim.floor_events();
  j["negative_eigenvalues"] = sim.negative_eigenvalues();
  j["grid"] = grid_spec;
  j["partitions"] = partition_labels;
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& pp : sim.pieces()) {
    nlohmann::json pj;
    pj["representative"] = pp.piece.label;
    pj["span_dim"] = pp.piece.span.size();
    nlohmann::json ranks = nlohmann::json::array();
    for (const auto& blk : pp.piece.quad) ranks.push_back({{"unit", blk.unit + 1}, {"rank", blk.rank}});
    pj["second_order"] = ranks;
    pj["free_units"] = pp.piece.n_free;
    pj["usable_grid"] = pp.resid.size() - pp.grid_begin;
    pieces.push_back(pj);
  }
  j["pieces"] = pieces;
  return j;
}

}  // namespace nnasym
