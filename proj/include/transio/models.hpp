#ifndef TRANSIO_MODELS_HPP
#define TRANSIO_MODELS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "transio/grid.hpp"

namespace transio {

enum class ModelFamily { exponential, gaussian, spherical, circular, triangular };

inline std::string family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::exponential: return "exponential";
    case ModelFamily::gaussian: return "gaussian";
    case ModelFamily::spherical: return "spherical";
    case ModelFamily::circular: return "circular";
    case ModelFamily::triangular: return "triangular";
  }
  throw std::logic_error("family_name: unknown family");
}

inline ModelFamily family_from_name(const std::string& s) {
  if (s == "exponential") return ModelFamily::exponential;
  if (s == "gaussian") return ModelFamily::gaussian;
  if (s == "spherical") return ModelFamily::spherical;
  if (s == "circular") return ModelFamily::circular;
  if (s == "triangular") return ModelFamily::triangular;
  throw std::invalid_argument("unknown model family: " + s);
}

/// Parametric auto-transiogram model: starts at 1, decreases toward the
/// sill (the class proportion) with range parameter a.
struct ParametricModel {
  ModelFamily family = ModelFamily::exponential;
  double range = 1.0;       // a > 0
  double proportion = 0.5;  // pi_k in (0,1)
  int tailclass = 1;
  int headclass = 1;

  void validate() const {
    if (!(range > 0.0)) throw std::invalid_argument("model: range must be positive");
    if (!(proportion > 0.0 && proportion < 1.0))
      throw std::invalid_argument("model: proportion must be in (0,1)");
  }
};

/// Closed-form evaluation of the named family at lag distance h.
/// Piecewise families return the sill beyond the range.
inline double eval_model(const ParametricModel& m, double h) {
  if (h < 0.0) throw std::invalid_argument("eval_model: negative lag distance");
  m.validate();
  const double t = h / m.range;
  const double drop = 1.0 - m.proportion;
  switch (m.family) {
    case ModelFamily::exponential:
      return 1.0 - drop * (1.0 - std::exp(-t));
    case ModelFamily::gaussian:
      return 1.0 - drop * (1.0 - std::exp(-t * t));
    case ModelFamily::triangular:
      return t >= 1.0 ? m.proportion : 1.0 - drop * t;
    case ModelFamily::spherical:
      return t >= 1.0 ? m.proportion : 1.0 - drop * (1.5 * t - 0.5 * t * t * t);
    case ModelFamily::circular: {
      if (t >= 1.0) return m.proportion;
      const double overlap = (2.0 / M_PI) * (std::acos(t) - t * std::sqrt(1.0 - t * t));
      return 1.0 - drop * (1.0 - overlap);
    }
  }
  throw std::logic_error("eval_model: unknown family");
}

struct CovariogramValue {
  double value = 0.0;
  int tail = 0, head = 0;
  LagVector lag;
};

struct VariogramValue {
  double value = 0.0;
  int tail = 0, head = 0;
  LagVector lag;
};

/// sigma_kk'(h) = pi_k (pi_k'|k(h) - pi_k')
inline double transiogram_to_covariogram(double p_head_given_tail, double pi_tail,
                                         double pi_head) {
  return pi_tail * (p_head_given_tail - pi_head);
}

/// gamma_kk'(h) = pi_k { pi_k'|k(0) - [pi_k'|k(h) + pi_k'|k(-h)]/2 }
inline double transiogram_to_crossvariogram(double p_forward, double p_backward, double p_at_zero,
                                            double pi_tail) {
  return pi_tail * (p_at_zero - 0.5 * (p_forward + p_backward));
}

/// Auto specialization gamma_kk(h) = pi_k (1 - pi_k|k(h)).
inline double auto_transiogram_to_variogram(double p_auto, double pi_tail) {
  return transiogram_to_crossvariogram(p_auto, p_auto, 1.0, pi_tail);
}

/// pi_k|k(h) = 1 - gamma_kk(h)/pi_k; rejects gamma > pi_k (negative probability).
inline double variogram_to_auto_transiogram(double gamma, double pi_tail) {
  if (gamma < 0.0) throw std::invalid_argument("variogram_to_auto_transiogram: negative gamma");
  if (gamma > pi_tail)
    throw std::invalid_argument("variogram_to_auto_transiogram: gamma exceeds class proportion");
  return 1.0 - gamma / pi_tail;
}

}  // namespace transio

#endif
