#include "dsearch/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dsearch/error.hpp"
#include "dsearch/masked_model.hpp"

namespace dsearch {

using nlohmann::json;

std::string_view to_string(GaussianReverseKernel kernel) {
  return kernel == GaussianReverseKernel::kPosteriorMeanPlugIn ? "posterior-mean" : "exact-mixture";
}

GaussianReverseKernel parse_reverse_kernel(std::string_view name) {
  if (name == "posterior-mean") return GaussianReverseKernel::kPosteriorMeanPlugIn;
  if (name == "exact-mixture") return GaussianReverseKernel::kExactMixture;
  fail(ErrorKind::kInvalidConfiguration, "unknown reverse kernel '" + std::string(name) + "'",
       "model.kernel");
}

namespace {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kGaussianMixture ? "gaussian-mixture" : "masked-sequence";
}

std::string_view to_string(SequencePriorKind kind) {
  switch (kind) {
    case SequencePriorKind::kUniform: return "uniform";
    case SequencePriorKind::kRandom: return "random";
    case SequencePriorKind::kTable: return "table";
  }
  return "uniform";
}

// Typed access to one JSON object with key-path tracking and an unknown-key
// check on close().
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::kInvalidConfiguration, "expected an object", path_);
  }

  std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

  bool has(const std::string& name) {
    seen_.insert(name);
    return j_.contains(name);
  }

  template <typename T>
  T get(const std::string& name, T fallback) {
    if (!has(name)) return fallback;
    return as<T>(j_.at(name), key(name));
  }

  template <typename T>
  T require(const std::string& name) {
    if (!has(name)) fail(ErrorKind::kInvalidConfiguration, "missing required field", key(name));
    return as<T>(j_.at(name), key(name));
  }

  Reader child(const std::string& name) {
    seen_.insert(name);
    static const json empty = json::object();
    return Reader(j_.contains(name) ? j_.at(name) : empty, key(name));
  }

  const json& raw(const std::string& name) {
    seen_.insert(name);
    return j_.at(name);
  }

  void close() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) fail(ErrorKind::kInvalidConfiguration, "unknown field", key(k));
    }
  }

  template <typename T>
  static T as(const json& v, const std::string& where) {
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(ErrorKind::kInvalidConfiguration, std::string("wrong type: ") + e.what(), where);
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
auto parse_enum(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), e.what(), where);
  }
}

ModelSpec read_model(Reader r) {
  ModelSpec m;
  const auto kind = r.require<std::string>("kind");
  if (kind == "gaussian-mixture") {
    m.kind = ModelKind::kGaussianMixture;
  } else if (kind == "masked-sequence") {
    m.kind = ModelKind::kMaskedSequence;
  } else {
    fail(ErrorKind::kInvalidConfiguration, "unknown model kind '" + kind + "'", r.key("kind"));
  }
  m.steps = r.get<int>("steps", m.steps);
  if (m.kind == ModelKind::kGaussianMixture) {
    m.noise_schedule = parse_enum(r.key("schedule"), [&] {
      return parse_noise_schedule_kind(r.get<std::string>("schedule", "linear-beta"));
    });
    m.kernel = parse_enum(r.key("kernel"), [&] {
      return parse_reverse_kernel(r.get<std::string>("kernel", "posterior-mean"));
    });
    if (!r.has("components")) {
      fail(ErrorKind::kInvalidConfiguration, "missing required field", r.key("components"));
    }
    const auto& comps = r.raw("components");
    if (!comps.is_array()) fail(ErrorKind::kInvalidConfiguration, "expected an array", r.key("components"));
    for (std::size_t i = 0; i < comps.size(); ++i) {
      Reader c(comps[i], r.key("components") + "[" + std::to_string(i) + "]");
      GmmComponent g;
      g.weight = c.require<double>("weight");
      g.mean = c.require<std::vector<double>>("mean");
      g.variance = c.require<double>("variance");
      c.close();
      m.components.push_back(std::move(g));
    }
  } else {
    m.length = r.get<int>("length", m.length);
    m.vocab = r.get<int>("vocab", m.vocab);
    m.mask_order_seed = r.get<std::uint64_t>("mask_order_seed", 0);
    Reader p = r.child("prior");
    const auto pk = p.get<std::string>("kind", "uniform");
    if (pk == "uniform") {
      m.prior.kind = SequencePriorKind::kUniform;
    } else if (pk == "random") {
      m.prior.kind = SequencePriorKind::kRandom;
      m.prior.concentration = p.get<double>("concentration", 1.0);
      m.prior.seed = p.get<std::uint64_t>("seed", 0);
    } else if (pk == "table") {
      m.prior.kind = SequencePriorKind::kTable;
      m.prior.probs = p.require<std::vector<std::vector<double>>>("probs");
    } else {
      fail(ErrorKind::kInvalidConfiguration, "unknown prior kind '" + pk + "'", p.key("kind"));
    }
    p.close();
  }
  r.close();
  return m;
}

SearchPlan read_plan(Reader r) {
  SearchPlan p;
  p.algorithm = parse_enum(r.key("algorithm"), [&] {
    return parse_algorithm(r.get<std::string>("algorithm", "dsearch"));
  });
  {
    Reader b = r.child("beam");
    p.beams.kind = parse_enum(b.key("kind"), [&] { return parse_beam_kind(b.get<std::string>("kind", "none")); });
    p.beams.initial = b.get<int>("initial", 1);
    p.beams.final = b.get<int>("final", 1);
    p.beams.kappa = b.get<double>("kappa", 1.0);
    b.close();
  }
  {
    Reader a = r.child("search_set");
    p.search_set.kind = parse_enum(a.key("kind"), [&] {
      return parse_search_set_kind(a.get<std::string>("kind", "all"));
    });
    p.search_set.budget_fraction = a.get<double>("budget_fraction", 1.0);
    p.search_set.beta = a.get<double>("beta", 3.0);
    p.search_set.gamma = a.get<double>("gamma", 1.0);
    p.search_set.delta = a.get<double>("delta", 1.0);
    p.search_set.step_levels = a.get<int>("step_levels", 4);
    p.search_set.mode = parse_enum(a.key("mode"), [&] {
      return parse_search_set_mode(a.get<std::string>("mode", "systematic"));
    });
    a.close();
  }
  p.child_budget = r.get<int>("child_budget", 1);
  p.duplication = r.get<int>("duplication", 1);
  {
    Reader e = r.child("estimator");
    p.estimator.mode = parse_enum(e.key("mode"), [&] {
      return parse_value_mode(e.get<std::string>("mode", "one-step"));
    });
    p.estimator.lookahead_steps = e.get<int>("lookahead_steps", 1);
    p.estimator.duplicates = e.get<int>("duplicates", 1);
    p.estimator.pooling = parse_enum(e.key("pooling"), [&] {
      return parse_pooling(e.get<std::string>("pooling", "max"));
    });
    p.estimator.alpha = e.get<double>("alpha", 1.0);
    e.close();
  }
  p.resample_rate = r.get<double>("resample_rate", 0.25);
  p.literal_quantile = r.get<bool>("literal_quantile", false);
  p.smc_resampling = parse_enum(r.key("smc_resampling"), [&] {
    return parse_resampling(r.get<std::string>("smc_resampling", "multinomial"));
  });
  p.smc_resample_every_step = r.get<bool>("smc_resample_every_step", true);
  p.best_of_n = r.get<int>("best_of_n", 1);
  p.record_values = r.get<bool>("record_values", false);
  r.close();
  try {
    p.validate();
  } catch (const Error& e) {
    const auto& f = e.field();
    throw Error(e.kind(), e.what(), f.rfind("plan.", 0) == 0 ? f : f.empty() ? "plan" : "plan." + f);
  }
  return p;
}

json write_model(const ModelSpec& m) {
  json j;
  j["kind"] = to_string(m.kind);
  j["steps"] = m.steps;
  if (m.kind == ModelKind::kGaussianMixture) {
    j["schedule"] = to_string(m.noise_schedule);
    j["kernel"] = to_string(m.kernel);
    j["components"] = json::array();
    for (const auto& c : m.components) {
      j["components"].push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
    }
  } else {
    j["length"] = m.length;
    j["vocab"] = m.vocab;
    j["mask_order_seed"] = m.mask_order_seed;
    json p;
    p["kind"] = to_string(m.prior.kind);
    if (m.prior.kind == SequencePriorKind::kRandom) {
      p["concentration"] = m.prior.concentration;
      p["seed"] = m.prior.seed;
    } else if (m.prior.kind == SequencePriorKind::kTable) {
      p["probs"] = m.prior.probs;
    }
    j["prior"] = p;
  }
  return j;
}

json write_plan(const SearchPlan& p) {
  json j;
  j["algorithm"] = to_string(p.algorithm);
  j["beam"] = {{"kind", to_string(p.beams.kind)},
               {"initial", p.beams.initial},
               {"final", p.beams.final},
               {"kappa", p.beams.kappa}};
  j["search_set"] = {{"kind", to_string(p.search_set.kind)},
                     {"budget_fraction", p.search_set.budget_fraction},
                     {"beta", p.search_set.beta},
                     {"gamma", p.search_set.gamma},
                     {"delta", p.search_set.delta},
                     {"step_levels", p.search_set.step_levels},
                     {"mode", to_string(p.search_set.mode)}};
  j["child_budget"] = p.child_budget;
  j["duplication"] = p.duplication;
  j["estimator"] = {{"mode", to_string(p.estimator.mode)},
                    {"lookahead_steps", p.estimator.lookahead_steps},
                    {"duplicates", p.estimator.duplicates},
                    {"pooling", to_string(p.estimator.pooling)},
                    {"alpha", p.estimator.alpha}};
  j["resample_rate"] = p.resample_rate;
  j["literal_quantile"] = p.literal_quantile;
  j["smc_resampling"] = to_string(p.smc_resampling);
  j["smc_resample_every_step"] = p.smc_resample_every_step;
  j["best_of_n"] = p.best_of_n;
  j["record_values"] = p.record_values;
  return j;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kInvalidConfiguration, std::string("config is not valid JSON: ") + e.what());
  }
  Reader r(j, "");
  RunConfig c;
  c.schema_version = r.get<int>("schema_version", kConfigSchemaVersion);
  if (c.schema_version != kConfigSchemaVersion) {
    fail(ErrorKind::kInvalidConfiguration, "unsupported schema version", "schema_version");
  }
  c.name = r.get<std::string>("name", c.name);
  c.model = read_model(r.child("model"));
  c.reward = r.require<std::string>("reward");
  c.plan = read_plan(r.child("plan"));
  if (r.has("c_bar")) {
    c.c_bar = Reader::as<double>(r.raw("c_bar"), "c_bar");
    if (!(*c.c_bar >= 1.0)) fail(ErrorKind::kInvalidConfiguration, "c_bar must be >= 1", "c_bar");
  }
  c.seeds = r.get<std::vector<std::uint64_t>>("seeds", c.seeds);
  if (c.seeds.empty()) fail(ErrorKind::kInvalidConfiguration, "need at least one seed", "seeds");
  c.output_dir = r.get<std::string>("output_dir", c.output_dir);
  c.trace = r.get<bool>("trace", false);
  c.checkpoints = r.get<std::vector<int>>("checkpoints", {});
  c.trajectories = r.get<int>("trajectories", c.trajectories);
  r.close();

  // Resolve names now so that a bad config fails before any work starts.
  try {
    build_reward(c);
  } catch (const Error& e) {
    throw Error(e.kind(), e.what(), "reward");
  }
  try {
    build_model(c.model);
  } catch (const Error& e) {
    throw Error(e.kind(), e.what(), e.field().empty() ? "model" : "model." + e.field());
  }
  try {
    plan_search_set(c.plan, c.model.steps, c.seeds.front());
  } catch (const Error& e) {
    throw Error(e.kind(), e.what(), e.field().empty() ? "plan" : "plan." + e.field());
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["model"] = write_model(c.model);
  j["reward"] = c.reward;
  j["plan"] = write_plan(c.plan);
  if (c.c_bar) j["c_bar"] = *c.c_bar;
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  j["trace"] = c.trace;
  j["checkpoints"] = c.checkpoints;
  j["trajectories"] = c.trajectories;
  return j.dump(2) + "\n";
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read config " + path.string(), "config");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::unique_ptr<DenoiserModel> build_model(const ModelSpec& spec) {
  if (spec.kind == ModelKind::kGaussianMixture) {
    return std::make_unique<GaussianMixtureDiffusion>(
        GmmPrior(spec.components), NoiseSchedule::build(spec.noise_schedule, spec.steps), spec.kernel);
  }
  if (spec.steps < 1) fail(ErrorKind::kInvalidConfiguration, "steps must be >= 1", "steps");
  auto prior = [&] {
    switch (spec.prior.kind) {
      case SequencePriorKind::kRandom:
        return FactorizedSeqPrior::random(spec.length, spec.vocab, spec.prior.concentration, spec.prior.seed);
      case SequencePriorKind::kTable: {
        FactorizedSeqPrior p(spec.prior.probs);
        if (p.length() != spec.length || p.vocab() != spec.vocab) {
          fail(ErrorKind::kInvalidConfiguration, "prior table shape disagrees with length/vocab", "prior.probs");
        }
        return p;
      }
      case SequencePriorKind::kUniform:
      default:
        return FactorizedSeqPrior::uniform(spec.length, spec.vocab);
    }
  }();
  return std::make_unique<MaskedSequenceDiffusion>(std::move(prior), spec.steps, spec.mask_order_seed);
}

std::unique_ptr<RewardOracle> build_reward(const RunConfig& config) {
  return make_reward_oracle(config.reward);
}

}  // namespace dsearch
