#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otcimpact/cli.hpp"
#include "otcimpact/debias.hpp"
#include "otcimpact/estimators.hpp"
#include "otcimpact/fit.hpp"
#include "otcimpact/io.hpp"
#include "otcimpact/multiprop.hpp"
#include "otcimpact/propagator.hpp"
#include "otcimpact/signing.hpp"
#include "otcimpact/synth.hpp"

#include <sstream>

namespace py = pybind11;
using namespace otcimpact;

namespace {

LagCurve curve_from(std::vector<double> values, CurveKind kind) {
  LagCurve c(kind, values.empty() ? 0 : values.size() - 1);
  c.values = std::move(values);
  return c;
}

SynthConfig synth_config(std::size_t n_trades, double phi, double g_inf, std::size_t k,
                         double noise_sd, double q, const std::string& price_sign,
                         double off_fraction, double off_scale, double label_fraction,
                         double initial_mid, std::uint64_t seed) {
  SynthConfig c;
  c.initial_mid = initial_mid;
  c.n_trades = n_trades;
  c.phi = phi;
  c.kernel = Kernel::ramp(g_inf, k);
  if (off_scale != 1.0) c.kernel_off = c.kernel.scaled(off_scale);
  c.off_fraction = off_fraction;
  c.noise_sd = noise_sd;
  c.q = q;
  if (price_sign == "reported") {
    c.price_sign = TradePriceSign::kReported;
  } else if (price_sign == "noisy") {
    c.price_sign = TradePriceSign::kNoisy;
  } else if (price_sign != "true") {
    throw Error(ErrorCode::kInvalidConfig, "price_sign must be true, reported or noisy",
                "price_sign");
  }
  c.label_fraction = label_fraction;
  c.seed = seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trade sign, response and propagator estimation";

  static py::handle error = py::exception<Error>(m, "OtcImpactError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.attr("__version__") = std::string(tool_version());

  py::class_<SignedTrade>(m, "SignedTrade")
      .def_property_readonly("ts", [](const SignedTrade& s) { return s.trade.ts; })
      .def_property_readonly("mid_before", [](const SignedTrade& s) { return s.mid_before; })
      .def_property_readonly("eps", [](const SignedTrade& s) { return static_cast<int>(s.eps); })
      .def_property_readonly("tie", [](const SignedTrade& s) { return s.tie; })
      .def_property_readonly("true_sign", [](const SignedTrade& s) -> std::optional<int> {
        if (!s.trade.true_sign) return std::nullopt;
        return static_cast<int>(*s.trade.true_sign);
      });

  py::class_<SynthTape>(m, "SynthTape")
      .def_readonly("true_signs", &SynthTape::true_signs)
      .def_readonly("reported_signs", &SynthTape::reported_signs)
      .def_readonly("mids", &SynthTape::mids)
      .def_readonly("categories", &SynthTape::categories)
      .def_property_readonly("n_eff_true", [](const SynthTape& d) { return d.truth.n_eff; })
      .def_property_readonly("rebase_scale", [](const SynthTape& d) { return d.truth.rebase_scale; })
      .def("classified", [](const SynthTape& d) { return classify_all(d.tape).trades; })
      .def("signed", [](const SynthTape& d, bool reported) {
        return signed_trades(d, reported ? SignChannel::kReported : SignChannel::kTrue);
      }, py::arg("reported") = false);

  m.def("make_dataset", [](std::size_t n_trades, double phi, double g_inf, std::size_t k,
                           double noise_sd, double q, const std::string& price_sign,
                           double off_fraction, double off_scale, double label_fraction,
                           double initial_mid, std::uint64_t seed) {
          return make_dataset(synth_config(n_trades, phi, g_inf, k, noise_sd, q, price_sign,
                                           off_fraction, off_scale, label_fraction, initial_mid,
                                           seed));
        },
        py::arg("n_trades") = 100000, py::arg("phi") = 0.5, py::arg("g_inf") = 5.0,
        py::arg("k") = 10, py::arg("noise_sd") = 0.0, py::arg("q") = 1.0,
        py::arg("price_sign") = "true", py::arg("off_fraction") = 0.0,
        py::arg("off_scale") = 1.0, py::arg("label_fraction") = 1.0,
        py::arg("initial_mid") = kRebaseLevel, py::arg("seed") = 1);

  m.def("autocorr", [](const std::vector<SignedTrade>& trades, std::size_t max_lag) {
    return autocorr(signs_of(trades), max_lag).values;
  }, py::arg("trades"), py::arg("max_lag"));
  m.def("response", [](const std::vector<SignedTrade>& trades, std::size_t max_lag) {
    return response(trades, max_lag).values;
  }, py::arg("trades"), py::arg("max_lag"));
  m.def("n_eff", [](std::vector<double> c, std::size_t l_sum) {
    return n_eff(curve_from(std::move(c), CurveKind::kAutocorr), l_sum);
  }, py::arg("c"), py::arg("l_sum"));
  m.def("label_accuracy", [](const std::vector<SignedTrade>& trades) {
    return label_accuracy(trades).q_hat;
  });

  m.def("solve_propagator", [](std::vector<double> c, std::vector<double> r, std::size_t K) {
    const auto sol = solve_propagator(curve_from(std::move(c), CurveKind::kAutocorr),
                                      curve_from(std::move(r), CurveKind::kResponse), K);
    py::dict out;
    out["g"] = sol.g;
    out["G"] = sol.G.values;
    out["residual_norm"] = sol.residual_norm;
    out["condition"] = sol.condition;
    out["ridge_applied"] = sol.ridge_applied;
    return out;
  }, py::arg("c"), py::arg("r"), py::arg("K"));
  m.def("bound_lower", &bound_lower, py::arg("r"), py::arg("n_eff"));
  m.def("bound_upper", &bound_upper, py::arg("r"), py::arg("n_eff"));

  m.def("c_true", [](const std::vector<SignedTrade>& trades, double q_hat, std::size_t max_lag) {
    return c_true(trades, q_hat, max_lag).values;
  }, py::arg("trades"), py::arg("q_hat"), py::arg("max_lag"));
  m.def("r_true", [](std::vector<double> r, double q_hat) {
    return r_true(curve_from(std::move(r), CurveKind::kResponse), q_hat).values;
  }, py::arg("r"), py::arg("q_hat"));

  m.def("fit_stretched", [](std::vector<double> values, const std::string& form,
                            std::size_t lag_min) {
    const auto f = parse_fit_form(form);
    if (!f) throw Error(ErrorCode::kInvalidConfig, "form must be decay or saturating", "form");
    FitOptions opts;
    opts.lag_min = lag_min;
    const auto p = fit_stretched(curve_from(std::move(values), CurveKind::kAutocorr), *f, opts);
    py::dict out;
    out["form"] = std::string(to_string(p.form));
    out["a"] = p.a;
    out["b"] = p.b;
    out["nu"] = p.nu;
    out["sse"] = p.sse;
    return out;
  }, py::arg("values"), py::arg("form"), py::arg("lag_min") = 1);

  m.def("venue_propagators", [](const std::vector<SignedTrade>& trades, std::size_t max_lag,
                                std::size_t K) {
    const auto scheme = venue_scheme();
    const auto sol = solve_multi(cross_corr(trades, scheme, max_lag),
                                 category_response(trades, scheme, max_lag), K);
    py::dict out;
    for (std::size_t k = 0; k < sol.categories.size(); ++k) {
      out[py::str(sol.categories[k])] = sol.kernels[k].G.values;
    }
    return out;
  }, py::arg("trades"), py::arg("max_lag"), py::arg("K"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs one command line invocation; returns (exit code, stdout, stderr).");
}
