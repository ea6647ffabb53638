#include "srforge/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <map>
#include <random>

namespace srforge {

namespace {

struct Evaluation {
  double loss;
  std::uint64_t kinks;
};

Evaluation evaluate(const LossBuilder& build, const std::vector<Tensor>& inputs) {
  Tape tape(false);
  tape.track_kinks();
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const auto& t : inputs) vars.push_back(tape.constant(t));
  const double loss = tape.scalar(build(tape, vars));
  return {loss, tape.kink_signature()};
}

// Scores one tensor: `perturbed` is mutated in place and restored; `eval` recomputes the loss.
void score_tensor(Tensor& perturbed, const Tensor& analytic, const std::function<Evaluation()>& eval,
                  const std::string& label, const GradCheckOptions& options, std::mt19937_64& rng,
                  GradCheckReport& report) {
  const auto n = static_cast<std::size_t>(perturbed.numel());
  double sq = 0.0;
  for (float g : analytic.data()) sq += double(g) * g;
  const double floor = options.relative_floor * std::sqrt(sq / std::max<std::size_t>(n, 1));
  std::vector<std::size_t> coords(n);
  std::iota(coords.begin(), coords.end(), 0);
  if (options.samples_per_input > 0 && options.samples_per_input < n) {
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(options.samples_per_input);
    std::sort(coords.begin(), coords.end());
  }
  const std::uint64_t base_kinks = eval().kinks;
  for (std::size_t j : coords) {
    const auto idx = static_cast<std::int64_t>(j);
    const float original = perturbed[idx];
    const float plus = static_cast<float>(original + options.step);
    const float minus = static_cast<float>(original - options.step);
    perturbed[idx] = plus;
    const Evaluation ep = eval();
    perturbed[idx] = minus;
    const Evaluation em = eval();
    perturbed[idx] = original;
    if (ep.kinks != base_kinks || em.kinks != base_kinks) {
      ++report.skipped_kink;
      continue;
    }
    const double fp = ep.loss, fm = em.loss;

    const double numeric = (fp - fm) / (static_cast<double>(plus) - minus);
    const double exact = analytic[idx];
    const double scale = std::max({std::abs(numeric), std::abs(exact), floor});
    if (scale <= options.min_magnitude) {
      ++report.skipped_small;
      continue;
    }
    const double rel = std::abs(numeric - exact) / scale;
    ++report.checked;
    if (rel < options.rel_tol) ++report.passed;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst = label + " coord " + std::to_string(j) + ": backward " + std::to_string(exact) +
                     " vs numeric " + std::to_string(numeric);
    }
  }
}

}  // namespace

GradCheckReport check_gradients(const LossBuilder& build, std::vector<Tensor> inputs,
                                const GradCheckOptions& options) {
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& t : inputs) vars.push_back(tape.leaf(t));
    tape.backward(build(tape, vars));
    for (Var v : vars) analytic.push_back(tape.grad(v));
  }
  GradCheckReport report;
  std::mt19937_64 rng(options.seed);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    score_tensor(inputs[i], analytic[i], [&] { return evaluate(build, inputs); }, "input " + std::to_string(i),
                 options, rng, report);
  }
  return report;
}

GradCheckReport check_parameter_gradients(Model& model, const ModelLossBuilder& build,
                                          const GradCheckOptions& options) {
  std::map<std::string, Tensor> analytic;
  {
    Tape tape;
    tape.backward(build(tape));
    analytic = tape.parameter_gradients();
  }
  const auto eval = [&] {
    Tape tape(false);
    tape.track_kinks();
    const double loss = tape.scalar(build(tape));
    return Evaluation{loss, tape.kink_signature()};
  };
  GradCheckReport report;
  std::mt19937_64 rng(options.seed);
  for (auto& p : model.parameters()) {
    auto it = analytic.find(p.name);
    if (it == analytic.end()) continue;
    score_tensor(p.value, it->second, eval, p.name, options, rng, report);
  }
  return report;
}

}  // namespace srforge
