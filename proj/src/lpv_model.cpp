// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/lpv_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace lpvtr {

using Index = Eigen::Index;

void AffineLpvSs::validate() const {
  for (const Tensor* t : {&A, &B, &C, &D})
    if (t->order() != 3)
      throw DimensionError("LPV model tensors must have order 3");
  const std::size_t k = A.dim(2);
  if (B.dim(2) != k || C.dim(2) != k || D.dim(2) != k)
    throw DimensionError("LPV model tensors disagree on the scheduling mode");
  if (A.dim(0) != A.dim(1)) throw DimensionError("A slices must be square");
  if (B.dim(0) != nx() || C.dim(1) != nx())
    throw DimensionError("B/C state dimension mismatch");
  if (D.dim(0) != ny() || D.dim(1) != nu())
    throw DimensionError("D dimension mismatch");
  if (affine && k < 1) throw DimensionError("affine model needs slice 0");
  for (const Tensor* t : {&A, &B, &C, &D})
    if (!t->all_finite()) throw NumericalError("LPV model has non-finite entries");
}

AffineLpvSs AffineLpvSs::zeros(std::size_t nx, std::size_t nu, std::size_t ny,
                               std::size_t np, bool affine) {
  const std::size_t k = np + (affine ? 1 : 0);
  if (k == 0) throw DimensionError("model needs at least one scheduling channel");
  return {Tensor({nx, nx, k}), Tensor({nx, nu, k}), Tensor({ny, nx, k}),
          Tensor({ny, nu, k}), affine};
}

Vector extend_scheduling(const AffineLpvSs& m, const Vector& p) {
  if (static_cast<std::size_t>(p.size()) != m.np())
    throw DimensionError("scheduling vector has length " +
                         std::to_string(p.size()) + ", model expects " +
                         std::to_string(m.np()));
  if (!m.affine) return p;
  Vector pbar(p.size() + 1);
  pbar[0] = 1.0;
  pbar.tail(p.size()) = p;
  return pbar;
}

namespace {

Matrix channel_sum(const Tensor& t, const Vector& pbar) {
  const auto rows = static_cast<Index>(t.dim(0));
  const auto cols = static_cast<Index>(t.dim(1));
  Eigen::Map<const Matrix> slices(t.data().data(), rows * cols,
                                  static_cast<Index>(t.dim(2)));
  Vector flat = slices * pbar;
  return Eigen::Map<const Matrix>(flat.data(), rows, cols);
}

}  // namespace

SystemMatrices eval_matrices(const AffineLpvSs& m, const Vector& p) {
  const Vector pbar = extend_scheduling(m, p);
  return {channel_sum(m.A, pbar), channel_sum(m.B, pbar),
          channel_sum(m.C, pbar), channel_sum(m.D, pbar)};
}

std::size_t param_count(const AffineLpvSs& m) {
  return m.A.size() + m.B.size() + m.C.size() + m.D.size();
}

Vector SchedulingMap::operator()(const Vector& x, const Vector& u) const {
  if (!fn_) throw std::logic_error("empty scheduling map");
  Vector p = fn_(x, u);
  if (static_cast<std::size_t>(p.size()) != np_)
    throw DimensionError("scheduling map returned length " +
                         std::to_string(p.size()) + ", expected " +
                         std::to_string(np_));
  return p;
}

SchedulingMap SchedulingMap::replay(const Matrix& p) {
  auto data = std::make_shared<const Matrix>(p);
  auto next = std::make_shared<Index>(0);
  return SchedulingMap(static_cast<std::size_t>(p.rows()),
                       [data, next](const Vector&, const Vector&) -> Vector {
                         if (*next >= data->cols())
                           throw DimensionError("replay map exhausted");
                         return data->col((*next)++);
                       });
}

namespace {

bool state_ok(const Vector& x) {
  return x.allFinite() && x.norm() <= kDivergenceBound;
}

template <typename PFn>
Trajectory run(const AffineLpvSs& m, PFn&& sched, std::size_t np,
               const Matrix& u, const Vector& x0, double td) {
  m.validate();
  if (static_cast<std::size_t>(u.rows()) != m.nu())
    throw DimensionError("input has " + std::to_string(u.rows()) +
                         " channels, model expects " + std::to_string(m.nu()));
  if (static_cast<std::size_t>(x0.size()) != m.nx())
    throw DimensionError("initial state length mismatch");
  const Index n = u.cols();
  Trajectory tr;
  tr.td = td;
  tr.u = u;
  tr.p.resize(static_cast<Index>(np), n);
  tr.x.resize(static_cast<Index>(m.nx()), n);
  tr.y.resize(static_cast<Index>(m.ny()), n);
  Vector x = x0;
  for (Index t = 0; t < n; ++t) {
    const Vector ut = u.col(t);
    const Vector p = sched(x, ut, t);
    const auto s = eval_matrices(m, p);
    tr.p.col(t) = p;
    tr.x.col(t) = x;
    tr.y.col(t) = s.C * x + s.D * ut;
    x = s.A * x + s.B * ut;
    if (!tr.y.col(t).allFinite() || !state_ok(x)) {
      const Index keep = tr.y.col(t).allFinite() ? t + 1 : t;
      tr.diverged_at = static_cast<std::size_t>(t + 1);
      tr.u.conservativeResize(Eigen::NoChange, keep);
      tr.p.conservativeResize(Eigen::NoChange, keep);
      tr.x.conservativeResize(Eigen::NoChange, keep);
      tr.y.conservativeResize(Eigen::NoChange, keep);
      break;
    }
  }
  return tr;
}

}  // namespace

Trajectory simulate(const AffineLpvSs& m, const Matrix& p, const Matrix& u,
                    const Vector& x0, double td) {
  if (p.cols() != u.cols())
    throw DimensionError("scheduling and input sequences differ in length");
  if (static_cast<std::size_t>(p.rows()) != m.np())
    throw DimensionError("scheduling sequence width mismatch");
  return run(
      m, [&](const Vector&, const Vector&, Index t) -> Vector { return p.col(t); },
      m.np(), u, x0, td);
}

Trajectory simulate(const AffineLpvSs& m, const SchedulingMap& eta,
                    const Matrix& u, const Vector& x0, double td) {
  if (eta.np() != m.np())
    throw DimensionError("scheduling map width " + std::to_string(eta.np()) +
                         " does not match model n_p " + std::to_string(m.np()));
  // A model without scheduling variables needs no map.
  const bool lti = m.np() == 0 && !eta;
  return run(
      m, [&](const Vector& x, const Vector& ut, Index) { return lti ? Vector() : eta(x, ut); },
      m.np(), u, x0, td);
}

Matrix markov_coefficient(const AffineLpvSs& m, const Matrix& window,
                          std::size_t lag) {
  if (static_cast<std::size_t>(window.cols()) != lag + 1)
    throw DimensionError("markov_coefficient: window needs lag + 1 columns");
  const auto last = static_cast<Index>(lag);
  if (lag == 0) return eval_matrices(m, window.col(0)).D;
  Matrix acc = eval_matrices(m, window.col(0)).B;  // B(p(t-m))
  for (Index l = 1; l < last; ++l) acc = eval_matrices(m, window.col(l)).A * acc;
  return eval_matrices(m, window.col(last)).C * acc;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << 't';
  const auto head = [&](const char* name, Index n) {
    for (Index i = 0; i < n; ++i) os << ',' << name << '_' << i;
  };
  head("u", tr.u.rows());
  head("p", tr.p.rows());
  head("x", tr.x.rows());
  head("y", tr.y.rows());
  os << '\n';
  char buf[40];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (Index t = 0; t < static_cast<Index>(tr.length()); ++t) {
    put(static_cast<double>(t) * tr.td);
    for (const Matrix* m : {&tr.u, &tr.p, &tr.x, &tr.y})
      for (Index i = 0; i < m->rows(); ++i) {
        os << ',';
        put((*m)(i, t));
      }
    os << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_trajectory_csv(os, tr);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty trajectory CSV");
  std::vector<char> kind;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell != "t") throw std::runtime_error("trajectory CSV must start with t");
    while (std::getline(ss, cell, ',')) {
      if (cell.size() < 3 || cell[1] != '_' ||
          std::string("upxy").find(cell[0]) == std::string::npos)
        throw std::runtime_error("bad trajectory CSV column '" + cell + "'");
      kind.push_back(cell[0]);
    }
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != kind.size() + 1)
      throw std::runtime_error("trajectory CSV row has wrong width");
    rows.push_back(std::move(row));
  }
  const auto count = [&](char c) {
    return static_cast<Index>(std::count(kind.begin(), kind.end(), c));
  };
  const Index n = static_cast<Index>(rows.size());
  Trajectory tr;
  tr.u.resize(count('u'), n);
  tr.p.resize(count('p'), n);
  tr.x.resize(count('x'), n);
  tr.y.resize(count('y'), n);
  for (Index t = 0; t < n; ++t) {
    Index iu = 0, ip = 0, ix = 0, iy = 0;
    for (std::size_t c = 0; c < kind.size(); ++c) {
      const double v = rows[static_cast<std::size_t>(t)][c + 1];
      switch (kind[c]) {
        case 'u': tr.u(iu++, t) = v; break;
        case 'p': tr.p(ip++, t) = v; break;
        case 'x': tr.x(ix++, t) = v; break;
        default: tr.y(iy++, t) = v; break;
      }
    }
  }
  if (n >= 2) tr.td = rows[1][0] - rows[0][0];
  return tr;
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  auto tr = read_trajectory_csv(is);
  tr.label = path;
  return tr;
}

}  // namespace lpvtr
