#pragma once

// Deterministic split plans over built subsets. A plan names its training
// subsets (split 90/10, stratified by class) and its evaluation sets; an
// eval set over a training subset receives that subset's holdout, an eval
// set over foreign subsets takes the stated fraction (1.0 = all of it).
// Membership is persisted as manifests so later runs agree byte-for-byte.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fdkit/error.hpp"
#include "fdkit/promptgen.hpp"
#include "fdkit/util.hpp"

namespace fdkit {

struct EvalSetSpec {
    std::string name;
    std::vector<std::string> subsets;
    double fraction = 1.0;
};

struct SplitPlan {
    std::string name;
    std::vector<std::string> train_subsets;
    double train_fraction = 0.9;
    std::vector<EvalSetSpec> eval_sets;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<std::string> condition_subsets(SensorPosition pos) {
    std::vector<std::string> out;
    for (int load = 0; load <= 3; ++load) out.push_back(subset_id_for(load, pos));
    return out;
}

}  // namespace detail

// Merge the four per-load subsets of one end, hold out 10% stratified.
inline SplitPlan task1_plan(SensorPosition end, std::uint64_t seed = 0) {
    SplitPlan plan;
    plan.name = end == SensorPosition::DriveEnd ? "task1-de" : "task1-fe";
    plan.train_subsets = detail::condition_subsets(end);
    plan.train_fraction = 0.9;
    plan.eval_sets = {{"eval", plan.train_subsets, 0.1}};
    plan.seed = seed;
    return plan;
}

// Train on 0HPDE, evaluate on its holdout plus five foreign conditions.
inline SplitPlan task2_plan(std::uint64_t seed = 0) {
    SplitPlan plan;
    plan.name = "task2";
    plan.train_subsets = {"0HPDE"};
    plan.train_fraction = 0.9;
    plan.eval_sets = {{"0HPDE", {"0HPDE"}, 0.1},  {"1HPDE", {"1HPDE"}, 1.0},
                      {"2HPDE", {"2HPDE"}, 1.0},  {"3HPDE", {"3HPDE"}, 1.0},
                      {"0HPFE", {"0HPFE"}, 1.0},  {"1HPFE", {"1HPFE"}, 1.0}};
    plan.seed = seed;
    return plan;
}

// Merge everything from both ends, hold out 10% stratified.
inline SplitPlan task3_plan(std::uint64_t seed = 0) {
    SplitPlan plan;
    plan.name = "task3";
    plan.train_subsets = detail::condition_subsets(SensorPosition::DriveEnd);
    for (const std::string& s : detail::condition_subsets(SensorPosition::FanEnd))
        plan.train_subsets.push_back(s);
    plan.train_fraction = 0.9;
    plan.eval_sets = {{"eval", plan.train_subsets, 0.1}};
    plan.seed = seed;
    return plan;
}

struct SplitResult {
    std::vector<PromptRecord> train;
    std::vector<std::pair<std::string, std::vector<PromptRecord>>> eval_sets;
};

namespace detail {

// Stratified shuffle of one subset: per class, a seeded Fisher-Yates, then
// the first round(n*holdout) records go to the holdout.
inline void split_subset(const std::vector<PromptRecord>& records, double holdout_fraction,
                         std::uint64_t seed, const std::string& subset,
                         std::vector<const PromptRecord*>& train_out,
                         std::vector<const PromptRecord*>& holdout_out) {
    std::map<int, std::vector<const PromptRecord*>> by_class;
    for (const PromptRecord& r : records) by_class[r.meta.label.index].push_back(&r);
    for (auto& [cls, members] : by_class) {
        std::mt19937_64 rng(mix_seed(seed, subset + "/" + std::to_string(cls)));
        deterministic_shuffle(members, rng);
        const std::size_t n_hold = static_cast<std::size_t>(
            std::llround(static_cast<double>(members.size()) * holdout_fraction));
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < n_hold ? holdout_out : train_out).push_back(members[i]);
    }
}

}  // namespace detail

inline SplitResult apply_plan(const SplitPlan& plan,
                              const std::map<std::string, std::vector<PromptRecord>>& corpora) {
    auto need_subset = [&](const std::string& id) -> const std::vector<PromptRecord>& {
        auto it = corpora.find(id);
        if (it == corpora.end() || it->second.empty())
            fail("MissingSubset", "plan " + plan.name + " requires subset " + id);
        return it->second;
    };

    const double holdout = 1.0 - plan.train_fraction;
    SplitResult result;
    std::map<std::string, std::vector<const PromptRecord*>> holdouts;
    std::vector<const PromptRecord*> train_ptrs;
    for (const std::string& subset : plan.train_subsets)
        detail::split_subset(need_subset(subset), holdout, plan.seed, subset, train_ptrs,
                             holdouts[subset]);
    result.train.reserve(train_ptrs.size());
    for (const PromptRecord* p : train_ptrs) result.train.push_back(*p);

    for (const EvalSetSpec& spec : plan.eval_sets) {
        std::vector<PromptRecord> members;
        for (const std::string& subset : spec.subsets) {
            const bool is_train_subset =
                std::find(plan.train_subsets.begin(), plan.train_subsets.end(), subset) !=
                plan.train_subsets.end();
            if (is_train_subset) {
                for (const PromptRecord* p : holdouts[subset]) members.push_back(*p);
            } else if (spec.fraction >= 1.0) {
                for (const PromptRecord& r : need_subset(subset)) members.push_back(r);
            } else {
                std::vector<const PromptRecord*> unused, sampled;
                detail::split_subset(need_subset(subset), spec.fraction, plan.seed, subset, unused,
                                     sampled);
                for (const PromptRecord* p : sampled) members.push_back(*p);
            }
        }
        result.eval_sets.emplace_back(spec.name, std::move(members));
    }
    return result;
}

// --- manifests ---------------------------------------------------------------

// One header line naming plan/seed/set, then one record id per line.
inline void write_manifest(const std::string& path, const std::string& plan_name,
                           std::uint64_t seed, const std::string& set_name,
                           const std::vector<PromptRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("IoError", "cannot create " + path);
    out << "# plan: " << plan_name << " seed: " << seed << " set: " << set_name << "\n";
    for (const PromptRecord& r : records) out << r.meta.record_id << "\n";
    if (!out) fail("IoError", "short write to " + path);
}

struct Manifest {
    std::string plan_name;
    std::uint64_t seed = 0;
    std::string set_name;
    std::vector<std::string> record_ids;
};

inline Manifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    Manifest m;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# plan: ", 0) != 0)
        fail("MalformedLine", "manifest " + path + " is missing its header line");
    {
        char plan[128], set[128];
        unsigned long long seed = 0;
        if (std::sscanf(line.c_str(), "# plan: %127s seed: %llu set: %127s", plan, &seed, set) != 3)
            fail("MalformedLine", "bad manifest header in " + path);
        m.plan_name = plan;
        m.seed = seed;
        m.set_name = set;
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) m.record_ids.push_back(line);
    }
    return m;
}

}  // namespace fdkit
