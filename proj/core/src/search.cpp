#include "melrefine/search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "melrefine/fmap_io.hpp"
#include "melrefine/metrics.hpp"

namespace melrefine {

void ParamRange::validate(const char* name) const {
  if (!(lo <= hi) || !(step > 0.0)) {
    throw std::invalid_argument(std::string("GridSpec: range for ") + name +
                                " needs lo <= hi and step > 0");
  }
}

std::vector<double> ParamRange::values() const {
  const std::size_t n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
  return v;
}

void GridSpec::validate() const {
  s1.validate("s1");
  s2.validate("s2");
  b1.validate("b1");
  b2.validate("b2");
  if (m_coarse.empty()) throw std::invalid_argument("GridSpec: m_coarse must not be empty");
  if (!(m_fine_step > 0.0)) throw std::invalid_argument("GridSpec: m_fine_step must be > 0");
}

namespace {

Trial run_trial(Objective& obj, const RefineParams& p) {
  Trial t;
  t.params = p;
  try {
    t.score = obj.evaluate(p);
    if (!std::isfinite(t.score)) {
      t.status = TrialStatus::kFailed;
      t.note = "non-finite score";
    }
  } catch (const std::exception& e) {
    t.status = TrialStatus::kFailed;
    t.note = e.what();
  }
  return t;
}

}  // namespace

MSweepResult coarse_sweep_m(Objective& obj, const std::vector<double>& candidates,
                            const RefineParams& anchor) {
  if (candidates.empty()) throw std::invalid_argument("coarse_sweep_m: no candidates");
  anchor.validate();

  MSweepResult result;
  result.table.reserve(candidates.size());
  bool have_best = false;
  double best_score = 0.0;
  for (double m : candidates) {
    RefineParams p = anchor;
    p.m = m;
    Trial t = run_trial(obj, p);
    result.table.push_back(t);
    if (t.status != TrialStatus::kOk) continue;
    if (!have_best || t.score < best_score || (t.score == best_score && m < result.m_best)) {
      have_best = true;
      best_score = t.score;
      result.m_best = m;
    }
  }
  if (!have_best) {
    throw Error("coarse_sweep_m: every candidate failed (objective " + obj.name() + ")");
  }
  return result;
}

GridResult grid_search(Objective& obj, const GridSpec& grid, double m_fixed, std::size_t workers) {
  grid.validate();
  if (!std::isfinite(m_fixed) || m_fixed <= 0.0) {
    throw std::invalid_argument("grid_search: m_fixed must be > 0");
  }

  const auto v_s1 = grid.s1.values();
  const auto v_s2 = grid.s2.values();
  const auto v_b1 = grid.b1.values();
  const auto v_b2 = grid.b2.values();

  // Fixed lexicographic trial order; constraint filtering happens up front.
  std::vector<RefineParams> points;
  for (double s1 : v_s1) {
    for (double s2 : v_s2) {
      if (grid.enforce_s1_ge_s2 && s1 < s2) continue;
      for (double b1 : v_b1) {
        for (double b2 : v_b2) {
          if (grid.enforce_b1_ge_b2 && b1 < b2) continue;
          RefineParams p;
          p.s1 = s1;
          p.s2 = s2;
          p.b1 = b1;
          p.b2 = b2;
          p.m = m_fixed;
          points.push_back(p);
        }
      }
    }
  }
  if (points.empty()) {
    std::string active;
    if (grid.enforce_s1_ge_s2) active += " s1>=s2";
    if (grid.enforce_b1_ge_b2) active += " b1>=b2";
    throw Error("grid_search: no grid point survives the ordering constraints (" +
                (active.empty() ? std::string("none active") : active.substr(1)) + ")");
  }

  std::vector<Trial> trials(points.size());
  const std::size_t n_workers = obj.parallel_safe() ? std::max<std::size_t>(1, workers) : 1;
  if (n_workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) trials[i] = run_trial(obj, points[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= points.size()) return;
        trials[i] = run_trial(obj, points[i]);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Rank: successes by (score, s1, s2, b1, b2), failures keep grid order at
  // the end. Stable order makes reruns byte-comparable.
  std::vector<std::size_t> order(trials.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Trial& ta = trials[a];
    const Trial& tb = trials[b];
    if (ta.status != tb.status) return ta.status == TrialStatus::kOk;
    if (ta.status != TrialStatus::kOk) return false;
    if (ta.score != tb.score) return ta.score < tb.score;
    const auto key = [](const Trial& t) {
      return std::array<double, 4>{t.params.s1, t.params.s2, t.params.b1, t.params.b2};
    };
    return key(ta) < key(tb);
  });

  GridResult result;
  result.table.reserve(trials.size());
  for (std::size_t i : order) result.table.push_back(trials[i]);
  if (result.table.empty() || result.table.front().status != TrialStatus::kOk) {
    throw Error("grid_search: every trial failed (objective " + obj.name() + ")");
  }
  result.best = result.table.front().params;
  result.best_score = result.table.front().score;
  return result;
}

void write_trials_tsv(const std::string& path, const std::vector<Trial>& table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("write_trials_tsv: cannot open " + path);
  out << "s1\ts2\tb1\tb2\tm\tscore\tstatus\n";
  char line[256];
  for (const Trial& t : table) {
    std::snprintf(line, sizeof(line), "%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%s\n", t.params.s1,
                  t.params.s2, t.params.b1, t.params.b2, t.params.m,
                  t.status == TrialStatus::kOk ? t.score : std::nan(""),
                  t.status == TrialStatus::kOk ? "ok" : "failed");
    out << line;
  }
}

double SyntheticBowl::evaluate(const RefineParams& p) {
  const double ds1 = p.s1 - center_.s1;
  const double ds2 = p.s2 - center_.s2;
  const double db1 = p.b1 - center_.b1;
  const double db2 = p.b2 - center_.b2;
  const double dm = p.m - center_.m;
  return ds1 * ds1 + ds2 * ds2 + db1 * db1 + db2 * db2 + dm * dm;
}

namespace {

std::string substitute_params(const std::string& tmpl, const RefineParams& p,
                              const std::string& out_path = "") {
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string cmd = tmpl;
  const std::pair<const char*, std::string> subs[] = {
      {"{s1}", fmt(p.s1)}, {"{s2}", fmt(p.s2)}, {"{b1}", fmt(p.b1)},
      {"{b2}", fmt(p.b2)}, {"{m}", fmt(p.m)},   {"{out}", out_path},
  };
  for (const auto& [key, value] : subs) {
    for (std::size_t pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos)) {
      cmd.replace(pos, std::strlen(key), value);
      pos += value.size();
    }
  }
  return cmd;
}

std::string run_command(const std::string& cmd) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw Error("external command failed to start: " + cmd);
  std::string output;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe)) output += buf;
  const int status = pclose(pipe);
  if (status != 0) {
    throw Error("external command exited with status " + std::to_string(status) + ": " + cmd);
  }
  return output;
}

}  // namespace

ExternalCommand::ExternalCommand(std::string command_template)
    : template_(std::move(command_template)) {
  if (template_.empty()) throw std::invalid_argument("ExternalCommand: empty command template");
}

double ExternalCommand::evaluate(const RefineParams& p) {
  const std::string output = run_command(substitute_params(template_, p));
  std::istringstream is(output);
  std::string tok, last;
  while (is >> tok) last = tok;
  if (last.empty()) throw Error("external command printed no score");
  try {
    std::size_t used = 0;
    const double score = std::stod(last, &used);
    if (used != last.size()) throw std::invalid_argument("trailing garbage");
    return score;
  } catch (const std::exception&) {
    throw Error("external command printed a non-numeric score: '" + last + "'");
  }
}

FdEmbeddings::FdEmbeddings(Options opt)
    : template_(std::move(opt.command_template)),
      out_path_(std::move(opt.out_path)),
      unet_(opt.unet),
      sampler_(opt.sampler),
      n_samples_(opt.n_samples) {
  if (opt.ref_path.empty()) throw std::invalid_argument("FdEmbeddings: ref_path is required");
  if (!template_.empty() && out_path_.empty()) {
    throw std::invalid_argument("FdEmbeddings: out path is required with a command template");
  }
  if (template_.empty()) {
    unet_.validate();
    sampler_.validate();
    if (n_samples_ < 2) throw std::invalid_argument("FdEmbeddings: need n_samples >= 2");
  }
  GaussianStats g = gaussian_stats(EmbeddingSet::from_feature_map(read_fmap(opt.ref_path)));
  ref_.mu = std::move(g.mu);
  ref_.sigma = std::move(g.sigma);
  ref_.d = g.d;
}

double FdEmbeddings::evaluate(const RefineParams& p) {
  EmbeddingSet gen;
  if (!template_.empty()) {
    run_command(substitute_params(template_, p, out_path_));
    gen = EmbeddingSet::from_feature_map(read_fmap(out_path_));
  } else {
    // Toy pipeline: one sampler run per embedding, embedding = per-row means.
    const ToyUNet net = build_unet(unet_);
    gen.n = n_samples_;
    gen.d = unet_.height;
    gen.v.resize(gen.n * gen.d);
    for (std::size_t s = 0; s < n_samples_; ++s) {
      SamplerConfig sc = sampler_;
      sc.seed = sampler_.seed + s;
      const FeatureMap out = ddim_sample(net, sc, &p);
      for (std::size_t y = 0; y < unet_.height; ++y) {
        double acc = 0.0;
        for (std::size_t c = 0; c < unet_.in_channels; ++c) {
          for (std::size_t x = 0; x < unet_.width; ++x) acc += out.at(0, c, y, x);
        }
        gen.v[s * gen.d + y] = acc / static_cast<double>(unet_.in_channels * unet_.width);
      }
    }
  }
  GaussianStats a;
  a.d = ref_.d;
  a.mu = ref_.mu;
  a.sigma = ref_.sigma;
  return frechet_distance(a, gaussian_stats(gen));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = s.find(sep, start);
    if (end == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

}  // namespace

std::unique_ptr<Objective> make_objective(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (kind == "synthetic-bowl") {
    if (rest.empty()) return std::make_unique<SyntheticBowl>();
    RefineParams center;
    std::string kv = rest;
    std::replace(kv.begin(), kv.end(), ',', ' ');
    center = params_from_kv(kv);
    return std::make_unique<SyntheticBowl>(center);
  }
  if (kind == "external") {
    if (rest.empty()) throw std::invalid_argument("objective: external needs a command");
    return std::make_unique<ExternalCommand>(rest);
  }
  if (kind == "fd-embeddings") {
    FdEmbeddings::Options opt;
    for (const std::string& part : split(rest, ';')) {
      if (part.empty()) continue;
      const std::size_t eq = part.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("objective: malformed fd-embeddings option '" + part + "'");
      }
      const std::string key = part.substr(0, eq);
      const std::string value = part.substr(eq + 1);
      if (key == "ref") opt.ref_path = value;
      else if (key == "cmd") opt.command_template = value;
      else if (key == "out") opt.out_path = value;
      else if (key == "seed") opt.sampler.seed = std::stoull(value), opt.unet.seed = opt.sampler.seed;
      else if (key == "steps") opt.sampler.steps = std::stoul(value);
      else if (key == "levels") opt.unet.levels = std::stoul(value);
      else if (key == "spatial") opt.unet.height = opt.unet.width = std::stoul(value);
      else if (key == "samples") opt.n_samples = std::stoul(value);
      else throw std::invalid_argument("objective: unknown fd-embeddings option '" + key + "'");
    }
    return std::make_unique<FdEmbeddings>(std::move(opt));
  }
  throw std::invalid_argument("objective: unknown kind '" + kind +
                              "' (expected synthetic-bowl, external or fd-embeddings)");
}

}  // namespace melrefine
