#pragma once

// Finite-difference operators and the source term of the thermal balance
//   c dT/dt = div(k grad T) - (v + gamma grad z) . grad T + A F r(T) - C (T - T_amb)

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "firesim/fields.hpp"

namespace firesim {

/// Defaults are the desk-scale values used by the synthetic scenarios; with
/// them t_burn is the burning equilibrium at unit fuel.
struct PhysicalParams {
  double c = 20.0;                         ///< heat capacity
  double k = 6.0;                          ///< thermal conductivity
  double gamma = 20.0;                     ///< terrain coefficient, m/s per unit slope
  double a_coeff = 2.0 * std::exp(0.3);    ///< reaction coefficient A
  double c_cool = 2.0;                     ///< cooling coefficient C
  double b_arrhenius = 0.3;                ///< activation constant of r(T)
  double t_ambient = 0.0;
  double t_burn = 1.0;

  void validate() const {
    const auto finite = [](double v) { return std::isfinite(v); };
    require(finite(c) && finite(k) && finite(gamma) && finite(a_coeff) && finite(c_cool) && finite(b_arrhenius) &&
                finite(t_ambient) && finite(t_burn),
            ErrorCode::InvalidParams, "physical parameters must be finite");
    require(c > 0.0, ErrorCode::InvalidParams, "c must be > 0");
    require(k >= 0.0 && gamma >= 0.0 && a_coeff >= 0.0 && c_cool >= 0.0, ErrorCode::InvalidParams,
            "k, gamma, a_coeff and c_cool must be >= 0");
    require(b_arrhenius > 0.0, ErrorCode::InvalidParams, "b_arrhenius must be > 0");
    require(t_burn > t_ambient, ErrorCode::InvalidParams, "t_burn must exceed t_ambient");
  }

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;
};

enum class BoundaryMode { ZeroFlux, DirichletAmbient };

struct Boundary {
  BoundaryMode mode = BoundaryMode::ZeroFlux;
  double ambient = 0.0;  ///< ghost value in DirichletAmbient mode
};

namespace detail {

/// Neighbour lookup with ghost cells. Zero flux copies the edge cell.
struct Stencil {
  const ScalarField& f;
  Boundary boundary;

  double at(long r, long c, double centre) const noexcept {
    const auto& s = f.spec();
    if (r < 0 || c < 0 || r >= static_cast<long>(s.height) || c >= static_cast<long>(s.width))
      return boundary.mode == BoundaryMode::ZeroFlux ? centre : boundary.ambient;
    return f(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
};

}  // namespace detail

/// (df/dx, df/dy) with x eastward and y northward: central differences inside,
/// one-sided along the edges.
inline std::pair<ScalarField, ScalarField> gradient(const ScalarField& f) {
  const GridSpec& s = f.spec();
  std::vector<double> gx(s.cells()), gy(s.cells());
  const double inv = 1.0 / s.dx;
  for (std::size_t r = 0; r < s.height; ++r) {
    for (std::size_t c = 0; c < s.width; ++c) {
      double dfx;
      if (c == 0)
        dfx = (f(r, 1) - f(r, 0)) * inv;
      else if (c == s.width - 1)
        dfx = (f(r, c) - f(r, c - 1)) * inv;
      else
        dfx = (f(r, c + 1) - f(r, c - 1)) * (0.5 * inv);
      // north is row - 1
      double dfy;
      if (r == 0)
        dfy = (f(0, c) - f(1, c)) * inv;
      else if (r == s.height - 1)
        dfy = (f(r - 1, c) - f(r, c)) * inv;
      else
        dfy = (f(r - 1, c) - f(r + 1, c)) * (0.5 * inv);
      gx[s.index(r, c)] = dfx;
      gy[s.index(r, c)] = dfy;
    }
  }
  return {ScalarField(s, std::move(gx)), ScalarField(s, std::move(gy))};
}

/// k times the 5-point Laplacian.
inline ScalarField diffusion(const ScalarField& f, double k, Boundary boundary = {}) {
  require(std::isfinite(k) && k >= 0.0, ErrorCode::InvalidParams, "k must be >= 0");
  const GridSpec& s = f.spec();
  std::vector<double> out(s.cells(), 0.0);
  if (k == 0.0) return ScalarField(s, std::move(out));
  const detail::Stencil st{f, boundary};
  const double scale = k / (s.dx * s.dx);
  for (long r = 0; r < static_cast<long>(s.height); ++r) {
    for (long c = 0; c < static_cast<long>(s.width); ++c) {
      const double centre = f(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      const double sum = st.at(r, c + 1, centre) + st.at(r, c - 1, centre) + st.at(r - 1, c, centre) +
                         st.at(r + 1, c, centre);
      out[s.index(static_cast<std::size_t>(r), static_cast<std::size_t>(c))] = scale * (sum - 4.0 * centre);
    }
  }
  return ScalarField(s, std::move(out));
}

/// v + gamma * grad z, cell by cell.
inline VectorField effective_velocity(const VectorField& wind, const ScalarField& terrain, double gamma) {
  require_same_spec(wind.spec(), terrain.spec(), "effective_velocity");
  const GridSpec& s = wind.spec();
  std::vector<double> u(wind.u().begin(), wind.u().end());
  std::vector<double> v(wind.v().begin(), wind.v().end());
  if (gamma != 0.0) {
    const auto [gzx, gzy] = gradient(terrain);
    for (std::size_t i = 0; i < s.cells(); ++i) {
      u[i] += gamma * gzx[i];
      v[i] += gamma * gzy[i];
    }
  }
  return VectorField(s, std::move(u), std::move(v));
}

/// v_eff . grad f with first-order upwinding against each velocity component.
inline ScalarField advection_with(const ScalarField& f, const VectorField& veff, Boundary boundary = {}) {
  require_same_spec(f.spec(), veff.spec(), "advection");
  const GridSpec& s = f.spec();
  const detail::Stencil st{f, boundary};
  const double inv = 1.0 / s.dx;
  std::vector<double> out(s.cells(), 0.0);
  for (long r = 0; r < static_cast<long>(s.height); ++r) {
    for (long c = 0; c < static_cast<long>(s.width); ++c) {
      const std::size_t i = s.index(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      const double centre = f[i];
      const double ue = veff.u()[i];
      const double ve = veff.v()[i];
      double acc = 0.0;
      if (ue > 0.0)
        acc += ue * (centre - st.at(r, c - 1, centre)) * inv;
      else if (ue < 0.0)
        acc += ue * (st.at(r, c + 1, centre) - centre) * inv;
      // northward flow takes its upwind value from the south neighbour (row + 1)
      if (ve > 0.0)
        acc += ve * (centre - st.at(r + 1, c, centre)) * inv;
      else if (ve < 0.0)
        acc += ve * (st.at(r - 1, c, centre) - centre) * inv;
      out[i] = acc;
    }
  }
  return ScalarField(s, std::move(out));
}

inline ScalarField advection(const ScalarField& f, const VectorField& wind, const ScalarField& terrain, double gamma) {
  require_same_spec(f.spec(), wind.spec(), "advection");
  require_same_spec(f.spec(), terrain.spec(), "advection");
  return advection_with(f, effective_velocity(wind, terrain, gamma));
}

/// Arrhenius-type burning rate exp(-b / (T - T_amb)) for T above ambient, else 0.
inline double reaction_rate(double temp, const PhysicalParams& p) noexcept {
  const double excess = temp - p.t_ambient;
  return excess > 0.0 ? std::exp(-p.b_arrhenius / excess) : 0.0;
}

inline ScalarField reaction_rate(const ScalarField& f, const PhysicalParams& params) {
  params.validate();
  return field_map(f, [&](double t) { return reaction_rate(t, params); });
}

inline void require_nonnegative_fuel(const ScalarField& fuel) {
  for (std::size_t i = 0; i < fuel.spec().cells(); ++i) {
    if (fuel[i] < 0.0)
      fail(ErrorCode::NegativeFuel, "fuel at row " + std::to_string(i / fuel.spec().width) + ", col " +
                                        std::to_string(i % fuel.spec().width));
  }
}

/// Net heat source A F r(T) - C (T - T_amb).
inline ScalarField source_term(const ScalarField& f, const ScalarField& fuel, const PhysicalParams& params) {
  params.validate();
  require_same_spec(f.spec(), fuel.spec(), "source_term");
  require_nonnegative_fuel(fuel);
  return field_map2(f, fuel, [&](double t, double fu) {
    return params.a_coeff * fu * reaction_rate(t, params) - params.c_cool * (t - params.t_ambient);
  });
}

/// A such that t_burn is the burning equilibrium at unit fuel: A r(t_burn) = C (t_burn - t_ambient).
inline double equilibrium_reaction_coefficient(double c_cool, double b_arrhenius, double t_ambient, double t_burn) {
  const double span = t_burn - t_ambient;
  return c_cool * span * std::exp(b_arrhenius / span);
}

}  // namespace firesim
