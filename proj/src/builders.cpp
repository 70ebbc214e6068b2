#include "mms/builders.hpp"

#include <algorithm>
#include <cmath>

namespace mms {

std::string to_string(BuilderKind k) {
  switch (k) {
    case BuilderKind::Euclidean: return "euclidean";
    case BuilderKind::Torus: return "torus";
    case BuilderKind::Finsler: return "finsler";
    case BuilderKind::Gaussian: return "gaussian";
    case BuilderKind::Heisenberg: return "heisenberg";
  }
  return "?";
}

BuilderKind builder_kind_from_string(const std::string& s) {
  if (s == "euclidean") return BuilderKind::Euclidean;
  if (s == "torus") return BuilderKind::Torus;
  if (s == "finsler") return BuilderKind::Finsler;
  if (s == "gaussian") return BuilderKind::Gaussian;
  if (s == "heisenberg") return BuilderKind::Heisenberg;
  throw std::invalid_argument("unknown builder kind: " + s);
}

int BuilderSpec::dim() const {
  return kind == BuilderKind::Gaussian ? static_cast<int>(gaussian_q.size())
                                       : static_cast<int>(extent.size());
}

namespace {

struct GridFrame {
  std::vector<int> shape;      // vertices per axis
  std::vector<double> origin;  // coordinate of index 0
  double h = 0.0;
  bool periodic = false;
  int n = 0;

  int linear(const std::vector<int>& id) const {
    int lin = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) lin = lin * shape[a] + id[a];
    return lin;
  }
};

GridFrame box_frame(const BuilderSpec& spec, bool periodic) {
  if (spec.h <= 0.0) throw std::invalid_argument("grid spacing must be positive");
  if (spec.extent.empty()) throw std::invalid_argument("extent must have at least one axis");
  GridFrame f;
  f.h = spec.h;
  f.periodic = periodic;
  f.n = 1;
  for (double L : spec.extent) {
    if (L <= 0.0) throw std::invalid_argument("degenerate extent");
    const int cells = static_cast<int>(std::llround(L / spec.h));
    if (cells < 1 || std::abs(cells * spec.h - L) > 1e-9 * L)
      throw std::invalid_argument("extent must be a positive multiple of h");
    const int pts = periodic ? cells : cells + 1;
    if (pts < 2) throw std::invalid_argument("degenerate extent: fewer than 2 points per axis");
    f.shape.push_back(pts);
    f.origin.push_back(0.0);
    f.n *= pts;
  }
  if (f.n > spec.max_points) throw resource_error("grid exceeds the configured point budget");
  return f;
}

Mat frame_coords(const GridFrame& f, const std::vector<double>& spacing) {
  const int d = static_cast<int>(f.shape.size());
  Mat c(f.n, d);
  std::vector<int> id(d, 0);
  for (int lin = 0; lin < f.n; ++lin) {
    int rem = lin;
    for (int a = d - 1; a >= 0; --a) {
      id[a] = rem % f.shape[a];
      rem /= f.shape[a];
    }
    for (int a = 0; a < d; ++a) c(lin, a) = f.origin[a] + id[a] * spacing[a];
  }
  return c;
}

std::vector<bool> interior_mask(const GridFrame& f) {
  std::vector<bool> adm(f.n, true);
  if (f.periodic) return adm;
  const int d = static_cast<int>(f.shape.size());
  for (int lin = 0; lin < f.n; ++lin) {
    int rem = lin;
    for (int a = d - 1; a >= 0; --a) {
      const int ia = rem % f.shape[a];
      rem /= f.shape[a];
      if (ia == 0 || ia == f.shape[a] - 1) {
        adm[lin] = false;
        break;
      }
    }
  }
  return adm;
}

// Tensor grid with per-point mass and per-edge weight factors. Masses are
// mass_scale * mass_factor(p); an axis edge (p,q) gets weight
// weight_scale * (factor_a(p) + factor_a(q)) / 2.
DiscreteSpace build_tensor_grid(const BuilderSpec& spec, bool periodic, double mass_scale,
                                double weight_scale,
                                const std::function<double(const Vec&)>& mass_factor,
                                const std::function<double(const Vec&, int)>& edge_factor) {
  GridFrame f = box_frame(spec, periodic);
  const int d = static_cast<int>(f.shape.size());
  std::vector<double> spacing(d, f.h);
  Mat coords = frame_coords(f, spacing);

  Vec measure(f.n);
  Mat factors;  // per point, per axis
  const bool unit_factors = !mass_factor && !edge_factor;
  if (!unit_factors) factors.resize(f.n, d);
  for (int i = 0; i < f.n; ++i) {
    const Vec x = coords.row(i);
    measure[i] = mass_scale * (mass_factor ? mass_factor(x) : 1.0);
    if (!unit_factors)
      for (int a = 0; a < d; ++a) factors(i, a) = edge_factor ? edge_factor(x, a) : 1.0;
  }

  GradientOperator grad;
  std::vector<int> id(d, 0);
  for (int lin = 0; lin < f.n; ++lin) {
    int rem = lin;
    for (int a = d - 1; a >= 0; --a) {
      id[a] = rem % f.shape[a];
      rem /= f.shape[a];
    }
    for (int a = 0; a < d; ++a) {
      int stride = 1;
      for (int b = a + 1; b < d; ++b) stride *= f.shape[b];
      int nb;
      if (id[a] + 1 < f.shape[a]) {
        nb = lin + stride;
      } else if (periodic) {
        nb = lin - (f.shape[a] - 1) * stride;
      } else {
        continue;
      }
      double w = weight_scale;
      if (!unit_factors) w *= 0.5 * (factors(lin, a) + factors(nb, a));
      grad.add_edge(lin, nb, w);
    }
  }

  DiscreteSpace space(std::move(measure), std::move(grad), std::move(coords), {},
                      interior_mask(f));
  GridInfo gi;
  gi.shape = f.shape;
  gi.spacing = spacing;
  gi.origin = f.origin;
  gi.periodic = periodic;
  space.set_grid(std::move(gi));
  return space;
}

}  // namespace

DiscreteSpace build_euclidean_grid(const BuilderSpec& spec) {
  const int d = static_cast<int>(spec.extent.size());
  return build_tensor_grid(spec, false, std::pow(spec.h, d), std::pow(spec.h, d - 2), nullptr,
                           nullptr);
}

DiscreteSpace build_periodic_torus(const BuilderSpec& spec) {
  const int d = static_cast<int>(spec.extent.size());
  return build_tensor_grid(spec, true, std::pow(spec.h, d), std::pow(spec.h, d - 2), nullptr,
                           nullptr);
}

DiscreteSpace build_finsler_grid(const BuilderSpec& spec) {
  const int d = static_cast<int>(spec.extent.size());
  std::function<Mat(const Vec&)> field = spec.finsler_field;
  if (!field) {
    if (!spec.finsler_a) throw std::invalid_argument("finsler builder needs A or a field");
    const Mat A = *spec.finsler_a;
    field = [A](const Vec&) { return A; };
  }
  auto analyse = [d](const Mat& A) {
    if (A.rows() != d || A.cols() != d)
      throw std::invalid_argument("finsler matrix dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("finsler matrix not positive definite at a sample point");
    return std::pair<double, Mat>(std::sqrt(A.determinant()), A.inverse());
  };
  auto mass_factor = [field, analyse](const Vec& x) { return analyse(field(x)).first; };
  auto edge_factor = [field, analyse](const Vec& x, int axis) {
    auto [sd, inv] = analyse(field(x));
    return inv(axis, axis) * sd;
  };
  return build_tensor_grid(spec, false, std::pow(spec.h, d), std::pow(spec.h, d - 2),
                           mass_factor, edge_factor);
}

DiscreteSpace build_gaussian_grid(const BuilderSpec& spec) {
  const int d = static_cast<int>(spec.gaussian_q.size());
  if (d < 1 || d > 3)
    throw std::invalid_argument("gaussian builder supports 1 to 3 truncated directions");
  for (double q : spec.gaussian_q)
    if (q <= 0.0) throw std::invalid_argument("covariance eigenvalues must be positive");
  if (spec.gaussian_radius <= 0.0) throw std::invalid_argument("truncation radius must be positive");
  if (spec.h <= 0.0) throw std::invalid_argument("grid spacing must be positive");

  const double qmax = *std::max_element(spec.gaussian_q.begin(), spec.gaussian_q.end());
  const double b = spec.gaussian_radius * std::sqrt(qmax);
  const int half = static_cast<int>(std::ceil(b / spec.h - 1e-12));
  if (half < 1) throw std::invalid_argument("degenerate extent: fewer than 2 points per axis");

  GridFrame f;
  f.h = spec.h;
  f.periodic = false;
  f.n = 1;
  for (int a = 0; a < d; ++a) {
    f.shape.push_back(2 * half + 1);
    f.origin.push_back(-half * spec.h);
    f.n *= 2 * half + 1;
  }
  if (f.n > spec.max_points) throw resource_error("grid exceeds the configured point budget");
  std::vector<double> spacing(d, spec.h);
  Mat coords = frame_coords(f, spacing);

  auto density = [&](const Vec& x) {
    double e = 0.0;
    for (int a = 0; a < d; ++a) e += x[a] * x[a] / (2.0 * spec.gaussian_q[a]);
    return std::exp(-e);
  };

  Vec rho(f.n);
  for (int i = 0; i < f.n; ++i) rho[i] = density(coords.row(i));
  const double hd = std::pow(spec.h, d);
  const double z = rho.sum() * hd;  // shared normaliser for masses and weights

  Vec measure = rho * (hd / z);
  GradientOperator grad;
  std::vector<int> id(d, 0);
  for (int lin = 0; lin < f.n; ++lin) {
    int rem = lin;
    for (int a = d - 1; a >= 0; --a) {
      id[a] = rem % f.shape[a];
      rem /= f.shape[a];
    }
    for (int a = 0; a < d; ++a) {
      int stride = 1;
      for (int bx = a + 1; bx < d; ++bx) stride *= f.shape[bx];
      if (id[a] + 1 >= f.shape[a]) continue;
      const int nb = lin + stride;
      grad.add_edge(lin, nb, 0.5 * (rho[lin] + rho[nb]) * std::pow(spec.h, d - 2) / z);
    }
  }

  DiscreteSpace space(std::move(measure), std::move(grad), std::move(coords), {}, {});
  GridInfo gi;
  gi.shape = f.shape;
  gi.spacing = spacing;
  gi.origin = f.origin;
  gi.periodic = false;
  space.set_grid(std::move(gi));

  // Truncated tail mass of the untruncated Gaussian, reported as a warning
  // when the box cuts off more than 1e-6 of it.
  double kept = 1.0;
  for (int a = 0; a < d; ++a)
    kept *= std::erf((half * spec.h) / std::sqrt(2.0 * spec.gaussian_q[a]));
  if (1.0 - kept > 1e-6)
    space.add_note("warning: truncation cuts off Gaussian mass " + std::to_string(1.0 - kept));
  return space;
}

DiscreteSpace build_heisenberg_grid(const BuilderSpec& spec) {
  if (spec.extent.size() != 3)
    throw std::invalid_argument("heisenberg builder needs a 3D box");
  if (spec.h <= 0.0) throw std::invalid_argument("grid spacing must be positive");
  // Horizontal steps shift z by (x or y)*h/2 = (integer)*h^2/2, so a z-spacing
  // of h^2/2 keeps every shifted stencil point on the lattice and every row a
  // two-point difference.
  const double hz = spec.h * spec.h / 2.0;
  std::vector<int> shape(3);
  std::vector<double> spacing = {spec.h, spec.h, hz};
  long long n = 1;
  for (int a = 0; a < 3; ++a) {
    const double step = spacing[a];
    const int cells = static_cast<int>(std::llround(spec.extent[a] / step));
    if (cells < 1 || std::abs(cells * step - spec.extent[a]) > 1e-9 * spec.extent[a])
      throw std::invalid_argument("extent must be a positive multiple of the axis spacing");
    shape[a] = cells + 1;
    if (shape[a] < 2) throw std::invalid_argument("degenerate extent");
    n *= shape[a];
  }
  if (n > spec.max_points) throw resource_error("grid exceeds the configured point budget");
  const int nn = static_cast<int>(n);

  auto lin3 = [&](int i, int j, int k) { return (i * shape[1] + j) * shape[2] + k; };
  Mat coords(nn, 3);
  for (int i = 0; i < shape[0]; ++i)
    for (int j = 0; j < shape[1]; ++j)
      for (int k = 0; k < shape[2]; ++k) {
        const int lin = lin3(i, j, k);
        coords(lin, 0) = i * spec.h;
        coords(lin, 1) = j * spec.h;
        coords(lin, 2) = k * hz;
      }

  const double vol = spec.h * spec.h * hz;
  Vec measure = Vec::Constant(nn, vol);

  GradientOperator grad;
  // Field moves on the lattice: X1 advances x by +-h and z by -+ j steps,
  // X2 advances y by +-h and z by +- i steps.
  auto target = [&](int i, int j, int k, int field, int dir) -> int {
    int ti = i, tj = j, tk = k;
    if (field == 0) {
      ti += dir;
      tk -= dir * j;
    } else {
      tj += dir;
      tk += dir * i;
    }
    if (ti < 0 || ti >= shape[0] || tj < 0 || tj >= shape[1] || tk < 0 || tk >= shape[2])
      return -1;
    return lin3(ti, tj, tk);
  };
  for (int i = 0; i < shape[0]; ++i)
    for (int j = 0; j < shape[1]; ++j)
      for (int k = 0; k < shape[2]; ++k) {
        const int p = lin3(i, j, k);
        for (int field = 0; field < 2; ++field) {
          const int fwd = target(i, j, k, field, +1);
          const int bwd = target(i, j, k, field, -1);
          if (fwd >= 0 && bwd >= 0) {
            grad.add_row(GradientRow{{bwd, fwd}, {-0.5 / spec.h, 0.5 / spec.h}, vol, p});
          } else if (fwd >= 0) {
            grad.add_row(GradientRow{{p, fwd}, {-1.0 / spec.h, 1.0 / spec.h}, vol, p});
          } else if (bwd >= 0) {
            grad.add_row(GradientRow{{bwd, p}, {-1.0 / spec.h, 1.0 / spec.h}, vol, p});
          }
          // both shifts outside the box: no row for this field here
        }
      }

  DiscreteSpace space(std::move(measure), std::move(grad), std::move(coords), {},
                      [&] {
                        std::vector<bool> adm(nn, true);
                        for (int i = 0; i < shape[0]; ++i)
                          for (int j = 0; j < shape[1]; ++j)
                            for (int k = 0; k < shape[2]; ++k)
                              if (i == 0 || i == shape[0] - 1 || j == 0 || j == shape[1] - 1 ||
                                  k == 0 || k == shape[2] - 1)
                                adm[lin3(i, j, k)] = false;
                        return adm;
                      }());
  GridInfo gi;
  gi.shape = shape;
  gi.spacing = spacing;
  gi.origin = {0.0, 0.0, 0.0};
  gi.periodic = false;
  space.set_grid(std::move(gi));
  return space;
}

DiscreteSpace build_space(const BuilderSpec& spec) {
  switch (spec.kind) {
    case BuilderKind::Euclidean: return build_euclidean_grid(spec);
    case BuilderKind::Torus: return build_periodic_torus(spec);
    case BuilderKind::Finsler: return build_finsler_grid(spec);
    case BuilderKind::Gaussian: return build_gaussian_grid(spec);
    case BuilderKind::Heisenberg: return build_heisenberg_grid(spec);
  }
  throw std::invalid_argument("unknown builder kind");
}

BuilderSpec refine(const BuilderSpec& spec) {
  BuilderSpec fine = spec;
  fine.h = spec.h / 2.0;
  return fine;
}

}  // namespace mms
