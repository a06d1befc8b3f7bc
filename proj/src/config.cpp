#include "stathedge/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stathedge/errors.hpp"
#include "toml.hpp"

namespace stathedge::config {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  fail(ErrorKind::Config, path + ": " + msg);
}

class Section {
 public:
  Section(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

  bool present() const { return t_ != nullptr; }
  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const toml::node* get(const std::string& k) {
    used_.insert(k);
    return t_ ? t_->get(k) : nullptr;
  }

  std::optional<double> num(const std::string& k) {
    const toml::node* n = get(k);
    if (!n) return std::nullopt;
    if (!n->is_number()) bad(field(k), "expected a number");
    const double v = n->value<double>().value();
    if (!std::isfinite(v)) bad(field(k), "must be finite");
    return v;
  }
  double num(const std::string& k, double def) { return num(k).value_or(def); }
  double req(const std::string& k) {
    auto v = num(k);
    if (!v) bad(field(k), "missing required number");
    return *v;
  }
  std::optional<std::int64_t> integer(const std::string& k) {
    const toml::node* n = get(k);
    if (!n) return std::nullopt;
    if (!n->is_integer()) bad(field(k), "expected an integer");
    return n->value<std::int64_t>().value();
  }
  std::optional<bool> boolean(const std::string& k) {
    const toml::node* n = get(k);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) bad(field(k), "expected true or false");
    return n->value<bool>().value();
  }
  std::optional<std::string> str(const std::string& k) {
    const toml::node* n = get(k);
    if (!n) return std::nullopt;
    if (!n->is_string()) bad(field(k), "expected a string");
    return n->value<std::string>().value();
  }
  std::optional<std::vector<double>> numbers(const std::string& k) {
    const toml::node* n = get(k);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) bad(field(k), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < a->size(); ++i) {
      const toml::node& e = *a->get(i);
      if (!e.is_number()) bad(field(k) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(e.value<double>().value());
    }
    return out;
  }
  Section sub(const std::string& k) {
    const toml::node* n = get(k);
    if (!n) return {nullptr, field(k)};
    if (!n->is_table()) bad(field(k), "expected a table");
    return {n->as_table(), field(k)};
  }
  void finish() const {
    if (!t_) return;
    for (const auto& [key, _] : *t_) {
      const std::string s(key.str());
      if (!used_.count(s)) bad(field(s), "unknown key");
    }
  }

 private:
  const toml::table* t_;
  std::string path_;
  std::set<std::string> used_;
};

models::NamedModel parse_model(Section& s, bool& running_average) {
  if (!s.present()) bad("model", "missing required table");
  const auto kind = s.str("kind");
  if (!kind) bad("model.kind", "missing required string");
  running_average = s.boolean("running_average").value_or(false);
  models::NamedModel out;
  if (*kind == "gbm") {
    models::Gbm1D m;
    m.mu = s.num("mu", m.mu);
    m.sigma = s.req("sigma");
    m.s0 = s.num("s0", m.s0);
    out = m;
  } else if (*kind == "correlated_gbm") {
    models::CorrelatedGbm2D m;
    m.mu1 = s.num("mu1", m.mu1);
    m.mu2 = s.num("mu2", m.mu2);
    m.sigma1 = s.req("sigma1");
    m.sigma2 = s.req("sigma2");
    m.rho = s.req("rho");
    m.s0 = s.num("s0", m.s0);
    m.v0 = s.num("v0", m.v0);
    out = m;
  } else if (*kind == "heston") {
    models::Heston m;
    m.m = s.num("m", m.m);
    m.kappa = s.req("kappa");
    m.theta = s.req("theta");
    m.delta = s.req("delta");
    m.rho = s.num("rho", m.rho);
    m.x1 = s.num("x1", m.x1);
    m.x2 = s.req("x2");
    out = m;
  } else if (*kind == "cev") {
    models::Cev m;
    m.m = s.num("m", m.m);
    m.delta = s.req("delta");
    m.eta = s.req("eta");
    m.x1 = s.num("x1", m.x1);
    out = m;
  } else {
    bad("model.kind", "unknown model '" + *kind + "' (gbm, correlated_gbm, heston, cev)");
  }
  s.finish();
  try {
    models::validate(out);
  } catch (const Error& e) {
    bad("model", e.what());
  }
  if (running_average && !std::holds_alternative<models::Cev>(out) &&
      !std::holds_alternative<models::Gbm1D>(out))
    bad("model.running_average", "only one-dimensional models (gbm, cev) take a running average");
  return out;
}

payoffs::ClaimSpec parse_claim(Section& s) {
  if (!s.present()) bad("claim", "missing required table");
  const auto kind = s.str("kind");
  if (!kind) bad("claim.kind", "missing required string");
  payoffs::ClaimSpec out;
  if (*kind == "correlated_call") {
    out = payoffs::CorrelatedCall{s.num("kprime", 1.0)};
  } else if (*kind == "letf_call") {
    payoffs::LetfCall c;
    c.kprime = s.num("kprime", c.kprime);
    c.ell = s.req("ell");
    c.l0 = s.num("l0", c.l0);
    if (c.ell == 0.0) bad("claim.ell", "leverage must be nonzero");
    if (c.l0 <= 0.0) bad("claim.l0", "must be positive");
    out = c;
  } else if (*kind == "geometric_asian_call") {
    out = payoffs::GeometricAsianCall{s.num("kprime", 1.0)};
  } else if (*kind == "power") {
    out = payoffs::power_claim(s.req("exponent"), s.num("scale", 1.0));
  } else if (*kind == "quadratic") {
    const double c = s.num("center", 1.0);
    out = payoffs::GenericEuropean{[c](double x) { return (x - c) * (x - c); },
                                   [c](double x) { return 2.0 * (x - c); },
                                   [](double) { return 2.0; }, "quadratic"};
  } else if (*kind == "softplus_call") {
    const double w = s.num("width", 1e-3);
    if (w <= 0.0) bad("claim.width", "must be positive");
    out = payoffs::softplus_call(s.num("kprime", 1.0), w);
  } else {
    bad("claim.kind", "unknown claim '" + *kind +
                          "' (correlated_call, letf_call, geometric_asian_call, power, quadratic, "
                          "softplus_call)");
  }
  s.finish();
  return out;
}

double model_s0(const models::NamedModel& m) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, models::Gbm1D> || std::is_same_v<T, models::CorrelatedGbm2D>)
          return v.s0;
        else
          return std::exp(v.x1);
      },
      m);
}

payoffs::InstrumentSet parse_instruments(Section& s, double s0) {
  if (!s.present()) bad("instruments", "missing required table");
  payoffs::InstrumentSet set;
  set.s0 = s0;
  set.includes_bond = s.boolean("bond").value_or(true);
  set.includes_forward = s.boolean("forward").value_or(true);
  const auto strikes = s.numbers("strikes");
  const auto band = s.numbers("band");
  const auto grid = s.integer("grid");
  if (strikes && band) bad("instruments", "give either strikes or band, not both");
  if (strikes) {
    if (grid) bad("instruments.grid", "only valid with band");
    if (strikes->empty() && !set.includes_bond && !set.includes_forward)
      bad("instruments.strikes", "instrument set is empty");
    for (std::size_t i = 0; i < strikes->size(); ++i) {
      if ((*strikes)[i] <= 0.0) bad("instruments.strikes[" + std::to_string(i) + "]", "must be positive");
      if (i > 0 && (*strikes)[i] < (*strikes)[i - 1]) bad("instruments.strikes", "must be sorted");
    }
    set.strikes = payoffs::DiscreteStrikes{*strikes};
  } else if (band) {
    if (band->size() != 2) bad("instruments.band", "expected [lower, upper]");
    payoffs::ContinuousBand b{(*band)[0], (*band)[1], 401};
    if (grid) {
      if (*grid < 51) bad("instruments.grid", "needs at least 51 points");
      b.grid_size = static_cast<std::size_t>(*grid);
    }
    if (!(b.lower > 0 && b.lower < s0 && s0 < b.upper))
      bad("instruments.band", "must satisfy 0 < lower < S0 < upper");
    set.strikes = b;
  } else {
    bad("instruments", "missing strikes or band");
  }
  s.finish();
  // duplicates are left to the moment engine, which reports them as redundant instruments
  return set;
}

}  // namespace

models::ModelSpec ExperimentConfig::build_model() const {
  auto m = models::make_model(model);
  return running_average ? models::with_running_average(m, maturity) : m;
}

moments::EngineOptions ExperimentConfig::engine_options() const {
  moments::EngineOptions o;
  o.maturity = maturity;
  o.expansion_order = solver.expansion_order;
  o.density_floor = solver.density_floor;
  return o;
}

bool ExperimentConfig::continuous() const {
  return std::holds_alternative<payoffs::ContinuousBand>(instruments.strikes);
}

ExperimentConfig parse_string(const std::string& text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    fail(ErrorKind::Config, os.str());
  }
  Section top(&root, "");
  ExperimentConfig c;
  c.maturity = top.num("maturity", 1.0);
  if (c.maturity <= 0.0) bad("maturity", "must be positive");
  if (auto seed = top.integer("seed")) {
    if (*seed < 0) bad("seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(*seed);
  }

  Section model = top.sub("model");
  c.model = parse_model(model, c.running_average);
  Section claim = top.sub("claim");
  c.claim = parse_claim(claim);
  Section ins = top.sub("instruments");
  c.instruments = parse_instruments(ins, model_s0(c.model));

  Section con = top.sub("constraint");
  if (con.present()) {
    c.cost_cap = con.num("C");
    c.cost_fraction = con.num("fraction");
    if (c.cost_cap && c.cost_fraction) bad("constraint", "give either C or fraction, not both");
    if (!c.cost_cap && !c.cost_fraction) bad("constraint", "needs C or fraction");
    if (c.cost_fraction && !(*c.cost_fraction > 0.0 && *c.cost_fraction <= 1.0))
      bad("constraint.fraction", "must lie in (0, 1]");
    con.finish();
  }

  Section sol = top.sub("solver");
  if (auto v = sol.integer("expansion_order")) {
    if (*v < 0 || *v > 3) bad("solver.expansion_order", "must be 0, 1, 2 or 3");
    c.solver.expansion_order = static_cast<int>(*v);
  }
  c.solver.density_floor = sol.num("density_floor", c.solver.density_floor);
  if (c.solver.density_floor <= 0.0) bad("solver.density_floor", "must be positive");
  if (auto v = sol.integer("mc_paths")) {
    if (*v < 1000) bad("solver.mc_paths", "needs at least 1000 paths");
    c.solver.mc_paths = static_cast<std::size_t>(*v);
  }
  if (auto v = sol.integer("steps_per_year")) {
    if (*v < 1) bad("solver.steps_per_year", "must be positive");
    c.solver.steps_per_year = static_cast<int>(*v);
  }
  if (auto v = sol.integer("total_steps")) {
    if (*v < 1) bad("solver.total_steps", "must be positive");
    c.solver.total_steps = static_cast<int>(*v);
  }
  if (auto v = sol.integer("workers")) {
    if (*v < 0) bad("solver.workers", "must be nonnegative");
    c.solver.workers = static_cast<int>(*v);
  }
  sol.finish();

  Section out = top.sub("output");
  if (auto d = out.str("dir")) c.output_dir = *d;
  out.finish();
  top.finish();

  const std::size_t dim = c.running_average ? 2 : models::make_model(c.model).dim;
  const bool needs2 = std::holds_alternative<payoffs::CorrelatedCall>(c.claim) ||
                      std::holds_alternative<payoffs::GeometricAsianCall>(c.claim);
  if (needs2 && dim < 2) bad("claim.kind", "claim needs a two-dimensional model");
  if (std::holds_alternative<payoffs::GeometricAsianCall>(c.claim) && !c.running_average)
    bad("model.running_average", "geometric_asian_call needs running_average = true");
  if (std::holds_alternative<payoffs::CorrelatedCall>(c.claim) &&
      !std::holds_alternative<models::CorrelatedGbm2D>(c.model))
    bad("claim.kind", "correlated_call needs model.kind = \"correlated_gbm\"");
  return c;
}

ExperimentConfig parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, path + ": cannot read config file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_string(os.str(), path);
}

}  // namespace stathedge::config
