#pragma once

#include <memory>
#include <string>
#include <vector>

#include "melrefine/refine.hpp"
#include "melrefine/sampler.hpp"
#include "melrefine/unet.hpp"

namespace melrefine {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
  void validate(const char* name) const;
};

// Grid definition for the four frequency gains plus the m sweep settings.
// Defaults bracket all shipped presets: s in [1.0, 1.6] step 0.1, b in
// [0.1, 1.0] step 0.1, coarse m candidates {1.0, 1.5, 2.0, 2.5, 3.0} with
// fine step 0.1. Ordering constraints are inclusive (s1 >= s2, b1 >= b2).
struct GridSpec {
  ParamRange s1{1.0, 1.6, 0.1};
  ParamRange s2{1.0, 1.6, 0.1};
  ParamRange b1{0.1, 1.0, 0.1};
  ParamRange b2{0.1, 1.0, 0.1};
  std::vector<double> m_coarse = {1.0, 1.5, 2.0, 2.5, 3.0};
  double m_fine_step = 0.1;
  bool enforce_s1_ge_s2 = true;
  bool enforce_b1_ge_b2 = true;

  void validate() const;
};

// A scoring recipe, lower is better. evaluate() may throw or return a
// non-finite value; either marks that trial failed. Implementations that are
// not safe to call concurrently return false from parallel_safe().
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double evaluate(const RefineParams& params) = 0;
  virtual std::string name() const = 0;
  virtual bool parallel_safe() const { return true; }
};

enum class TrialStatus { kOk, kFailed };

struct Trial {
  RefineParams params;
  double score = 0.0;
  TrialStatus status = TrialStatus::kOk;
  std::string note;  // failure reason when status == kFailed
};

struct MSweepResult {
  double m_best = 1.0;
  std::vector<Trial> table;  // in candidate order
};

// Evaluates the objective at each m candidate with the other gains held at
// `anchor`. Failed trials are excluded; ties break toward smaller m. Throws
// if every candidate fails.
MSweepResult coarse_sweep_m(Objective& obj, const std::vector<double>& candidates,
                            const RefineParams& anchor = RefineParams{});

struct GridResult {
  RefineParams best;
  double best_score = 0.0;
  std::vector<Trial> table;  // ranked: successful by (score, s1, s2, b1, b2), failures last
};

// Cartesian sweep over (s1, s2, b1, b2) at fixed m. Points violating an
// enabled ordering constraint are skipped before evaluation. Trials may run
// on `workers` threads when the objective allows it; results are assembled
// in a fixed order either way.
GridResult grid_search(Objective& obj, const GridSpec& grid, double m_fixed,
                       std::size_t workers = 1);

void write_trials_tsv(const std::string& path, const std::vector<Trial>& table);

// --- Built-in objectives -------------------------------------------------

// (s1-c1)^2 + (s2-c2)^2 + (b1-c3)^2 + (b2-c4)^2 + (m-c5)^2.
class SyntheticBowl : public Objective {
 public:
  explicit SyntheticBowl(RefineParams center = preset("tango2")) : center_(center) {}
  double evaluate(const RefineParams& p) override;
  std::string name() const override { return "synthetic-bowl"; }

 private:
  RefineParams center_;
};

// Runs a user command with {s1} {s2} {b1} {b2} {m} substituted and reads the
// score from the last token the command prints. Declared serial: external
// programs make no reentrancy promises.
class ExternalCommand : public Objective {
 public:
  explicit ExternalCommand(std::string command_template);
  double evaluate(const RefineParams& p) override;
  std::string name() const override { return "external-command"; }
  bool parallel_safe() const override { return false; }

 private:
  std::string template_;
};

// Frechet distance between reference embeddings and embeddings produced for
// the candidate params, either by the built-in toy pipeline (n_samples
// sampler runs, one per-row-mean embedding each) or by a user command that
// writes an embeddings FMAP to out_path.
class FdEmbeddings : public Objective {
 public:
  struct Options {
    std::string ref_path;          // required, FMAP (1, 1, n, d)
    std::string command_template;  // optional; empty means toy pipeline
    std::string out_path;          // required with command_template
    UNetConfig unet;
    SamplerConfig sampler;
    std::size_t n_samples = 8;
  };

  explicit FdEmbeddings(Options opt);
  double evaluate(const RefineParams& p) override;
  std::string name() const override { return "fd-embeddings"; }
  bool parallel_safe() const override { return template_.empty(); }

 private:
  std::string template_;
  std::string out_path_;
  UNetConfig unet_;
  SamplerConfig sampler_;
  std::size_t n_samples_;
  struct GaussianRef {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::size_t d;
  };
  GaussianRef ref_;
};

// Parses an objective spec string:
//   "synthetic-bowl"                          bowl centered on the tango2 preset
//   "synthetic-bowl:s1=..,s2=..,b1=..,b2=..,m=.."
//   "external:<command with {s1}... placeholders>"
//   "fd-embeddings:ref=R.fmap[;cmd=...;out=...][;seed=..;steps=..;levels=..;
//        spatial=..;samples=..]"
std::unique_ptr<Objective> make_objective(const std::string& spec);

}  // namespace melrefine
