#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "faq/factor.hpp"
#include "faq/query.hpp"
#include "faq/rational.hpp"

namespace faq {

// Work counters shared by all evaluation entry points.
struct EvalStats {
  uint64_t probes = 0;       // trie descents: successor walks and lookups
  uint64_t plus_ops = 0;     // ⊕ applications
  uint64_t times_ops = 0;    // ⊗ applications, powering included
  uint64_t power_mults = 0;  // ⊗ applications spent inside pointwise powers
  uint64_t tuples = 0;       // full bindings reached across all kernel runs
};

// One elimination step of the plan. Semiring and free steps carry U_k and an
// AGM estimate of the step's sub-join computed from actual factor sizes;
// product steps carry the powering work instead.
struct StepReport {
  enum Kind { Semiring, Product, Free };
  int k = 0;        // 1-based position in sigma; steps run k = n down to 1
  Vertex var = -1;  // sigma[k-1]
  Kind kind = Semiring;
  VertexSet u;      // U_k (empty for product steps)
  double agm = 0.0;
  uint64_t tuples = 0;
  uint64_t probes = 0;
  uint64_t power_mults = 0;
};

struct EngineOptions {
  bool check_order = true;          // require the ordering to be an admitted member
  bool indicator_projections = true;  // join filtering factors from edges meeting U_k
  uint64_t brute_cap = 10'000'000;  // ∏ domain sizes bound for brute_force_eval
};

// φ computed literally in the written aggregate order by nested folds over
// the full domain grid. Output keyed by the free variables in ascending
// order; zero results dropped. Exceeding the grid cap is a size error.
ListingFactor brute_force_eval(const Query& q, uint64_t cap = 10'000'000);

struct KernelResult {
  ListingFactor out;
  uint64_t tuples = 0;  // full bindings reached
  uint64_t probes = 0;
};

// Worst-case-optimal backtracking join kernel. `order` lists the
// participating variables outermost first; the leading `out_prefix` of them
// key the output and the remainder is folded with `op` (ignored when
// everything is keyed). Each factor's support must be sorted by position in
// `order` — reorder() first; violations are structural errors. A variable in
// no factor ranges over its full domain (`dom_of` is indexed by variable
// id). Empty-support factors are not accepted; fold scalars in afterwards.
KernelResult outside_in(const SemiringSpec& spec, const std::vector<Vertex>& order,
                        size_t out_prefix, OpId op,
                        const std::vector<const ListingFactor*>& factors,
                        const std::vector<uint32_t>& dom_of, EvalStats* stats = nullptr);

// Evaluation state of the main loop: the live factor list (the edge set
// 𝓔_k), the accumulated scalar multiplier, and — once the free phase starts
// — the snapshot of 𝓔_f plus the retained per-free-variable join factors
// that the output phase multiplies back in.
struct EvalState {
  const Query* q = nullptr;
  VariableOrdering sigma;
  EngineOptions opts;
  std::vector<ListingFactor> factors;
  SemiringValue scalar;
  int next_k = 0;                       // σ position eliminated next; 0 = done
  std::vector<ListingFactor> snapshot;  // 𝓔_f factors, taken before the free phase
  std::vector<ListingFactor> retained;  // ψ_{U_k} for k = f..1, computation order
  SemiringValue witness;                // 𝟎/𝟏 emptiness constant after the free phase
  std::vector<StepReport> steps;
  EvalStats stats;
};

// Performs the admissibility check (unless opts.check_order is off) and
// re-keys every factor to σ-consistent supports. The max-times carrier
// rejects product aggregates here: they would need mid-stream lowering.
EvalState make_eval_state(const Query& q, const VariableOrdering& sigma,
                          const EngineOptions& opts = {});

// The three elimination kinds. k is the 1-based σ position and must be the
// state's next pending one; the variable's aggregate class must match.
void eliminate_semiring_var(EvalState& st, int k);
void eliminate_product_var(EvalState& st, int k);
void eliminate_free_var(EvalState& st, int k);

struct InsideOutResult {
  ListingFactor out;
  SemiringValue witness;
  std::vector<StepReport> steps;
  EvalStats stats;
};

// Runs the elimination loop along σ (bound variables first, then the free
// phase) and the factorized output join. Output support is the free
// variables in ascending order, zeros dropped.
InsideOutResult inside_out(const Query& q, const VariableOrdering& sigma,
                           const EngineOptions& opts = {});

// Streams the factorized output in lexicographic order of σ's free prefix.
// The callback receives each tuple (keyed by ascending variable id), its
// value, and the probes spent since the previous emission; returning false
// stops the walk. Requires a state with every variable eliminated. Returns
// the number of tuples emitted.
uint64_t enumerate_output(EvalState& st,
                          const std::function<bool(const Key&, const SemiringValue&, uint64_t)>& emit);

enum class OutputMode { Listing, Count, Enumerate };
enum class OrderChoice { AutoExact, AutoApprox, Given };

struct PlanReport {
  VariableOrdering sigma;
  Rat faqw;                        // width of the chosen ordering
  bool order_checked = false;
  bool truncated_search = false;   // the exact ordering search hit its cap
  std::vector<StepReport> steps;
  EvalStats stats;
};

struct EvalResult {
  ListingFactor out;       // Listing mode (Count/Enumerate leave it empty)
  uint64_t count = 0;      // non-zero output tuples
  SemiringValue witness;
  PlanReport plan;
};

struct EvalRequest {
  OutputMode mode = OutputMode::Listing;
  OrderChoice choice = OrderChoice::AutoExact;
  VariableOrdering sigma;   // Given mode only
  EngineOptions opts;
  size_t linex_cap = 20000; // AutoExact falls back to the approximation past this
  // Enumerate mode sink; when empty the tuples are only counted.
  std::function<bool(const Key&, const SemiringValue&, uint64_t)> sink;
};

// Selects an ordering (exact search over the admitted set when small, the
// width approximation otherwise, or the given σ), evaluates, and reports the
// plan alongside the result.
EvalResult eval(const Query& q, const EvalRequest& req = {});

}  // namespace faq
