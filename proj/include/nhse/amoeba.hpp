#pragma once

#include <optional>
#include <vector>

#include "nhse/error.hpp"
#include "nhse/lattice_model.hpp"

namespace nhse {

struct WindingOptions {
  double ill_tol = 1e-6;      // relative to the median |det| on the loop
  double integer_tol = 0.05;  // allowed distance of the raw sum from an integer
  int max_grid = 16384;       // adaptive doubling stops here
};

struct WindingReport {
  std::optional<int> value;  // empty: ill defined
  double raw = 0.0;          // (1/2pi) * integral of d arg det
  double min_abs_det = 0.0;
  double median_abs_det = 0.0;
  int k_points = 0;

  bool defined() const { return value.has_value(); }
};

// Winding of k -> det[E - H(e^{mu + i k})] along `axis` with the other
// momenta fixed to `transverse` (axis order, axis omitted). The grid starts
// at `grid` points and doubles until the raw sum is within integer_tol of
// the unwrapped-phase count.
WindingReport winding_number(const TightBindingModel& model, Complex energy,
                             const std::vector<double>& mu, int axis,
                             const std::vector<double>& transverse, int grid,
                             const WindingOptions& options = {});

struct RonkinEvaluation {
  double value = 0.0;
  Complex energy;
  std::vector<double> mu;
  std::vector<int> grid;
  std::optional<std::vector<double>> gradient;
  int excluded_nodes = 0;
};

// Torus average of ln|det[E - H(e^{mu + i k})]| on a per-axis grid.
// Nodes with |det| < 1e-14 are skipped; TooSingular above 1%.
RonkinEvaluation ronkin_value(const TightBindingModel& model, Complex energy,
                              const std::vector<double>& mu, const std::vector<int>& grid);

// Component j: transverse average of the raw winding along axis j, which is
// the exact mu_j-derivative of the quadrature in ronkin_value.
std::vector<double> ronkin_gradient(const TightBindingModel& model, Complex energy,
                                    const std::vector<double>& mu, const std::vector<int>& grid);

// Value and gradient from one pass.
RonkinEvaluation ronkin_evaluate(const TightBindingModel& model, Complex energy,
                                 const std::vector<double>& mu, const std::vector<int>& grid);

enum class AmoebaReport { Interior, BoundaryOfAmoeba };

const char* to_string(AmoebaReport report);

struct MinimizeOptions {
  int max_iterations = 500;
  double initial_step = 0.5;
  double shrink = 0.5;
  double armijo = 1e-4;
  double mu_max = 5.0;
  double min_step = 1e-10;
  double ill_tol = 1e-6;
};

struct RonkinMinimum {
  std::vector<double> mu_star;
  AmoebaReport report = AmoebaReport::Interior;
  double value = 0.0;
  std::vector<double> gradient;
  int iterations = 0;
};

// Raised by ronkin_minimize; carries the lowest iterate seen.
class MaxIterationsError : public Error {
 public:
  MaxIterationsError(const std::string& message, std::vector<double> best_mu, double best_value);
  const std::vector<double>& best_mu() const { return best_mu_; }
  double best_value() const { return best_value_; }

 private:
  std::vector<double> best_mu_;
  double best_value_;
};

// Projected gradient descent with Armijo backtracking inside |mu_m| <= mu_max.
RonkinMinimum ronkin_minimize(const TightBindingModel& model, Complex energy,
                              const std::vector<double>& mu_init, const std::vector<int>& grid,
                              double gtol, const MinimizeOptions& options = {});

struct AmoebaTest {
  bool in_obc_spectrum = false;
  RonkinMinimum minimum;
};

AmoebaTest amoeba_obc_test(const TightBindingModel& model, Complex energy,
                           const std::vector<int>& grid, double gtol,
                           const MinimizeOptions& options = {});

}  // namespace nhse
