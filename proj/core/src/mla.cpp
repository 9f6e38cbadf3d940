#include "yieldcycle/mla.hpp"

#include <algorithm>

#include "yieldcycle/error.hpp"
#include "yieldcycle/random.hpp"

namespace yieldcycle {

int VotingEnsemble::vote(std::span<const double> x) const {
    if (x.size() != feature_names.size()) {
        throw DataError("feature vector has " + std::to_string(x.size()) + " values, ensemble expects " +
                        std::to_string(feature_names.size()));
    }
    int sum = 0;
    if (level == 1) {
        for (const auto& m : models) sum += m.predict(x);
    } else {
        for (const auto& m : members) sum += m.vote(x);
    }
    return sum >= 0 ? 1 : -1;
}

std::vector<int> VotingEnsemble::vote_rows(const Eigen::MatrixXd& rows) const {
    if (static_cast<std::size_t>(rows.cols()) != feature_names.size()) {
        throw DataError("feature matrix has " + std::to_string(rows.cols()) + " columns, ensemble expects " +
                        std::to_string(feature_names.size()));
    }
    std::vector<int> sum(static_cast<std::size_t>(rows.rows()), 0);
    auto add = [&](const std::vector<int>& votes) {
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += votes[i];
    };
    if (level == 1) {
        for (const auto& m : models) add(m.predict_rows(rows));
    } else {
        for (const auto& m : members) add(m.vote_rows(rows));
    }
    for (auto& v : sum) v = v >= 0 ? 1 : -1;
    return sum;
}

int vote(const VotingEnsemble& ensemble, std::span<const double> x) { return ensemble.vote(x); }

std::vector<RankedCandidate> rank_candidates(std::vector<RankedCandidate> candidates) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const RankedCandidate& a, const RankedCandidate& b) { return a.hit_rate > b.hit_rate; });
    return candidates;
}

Level1Result build_level1(const Dataset& data, std::span<const ClassifierSpec> registry,
                          const Level1Options& options, std::uint64_t seed) {
    const std::string where = data.provenance.to_string();
    if (options.members == 0 || options.members % 2 == 0) {
        throw DataError("level-1 member count must be odd");
    }
    Level1Result result;
    result.selection.level = 1;
    result.selection.country = data.provenance.country;
    if (data.provenance.cycle) result.selection.cycle = *data.provenance.cycle;

    std::vector<RankedCandidate> scored;
    std::vector<ClassifierSpec> survivors;
    for (const auto& spec : registry) {
        const auto id = resolve(spec).id();
        try {
            auto report = cross_validate(spec, data, options.cv, seed);
            scored.push_back({id, report.mean_hit_rate});
            survivors.push_back(report.spec);
            result.cv_reports.push_back(std::move(report));
        } catch (const DataError& e) {
            result.selection.excluded[id] = e.what();
        }
    }
    if (survivors.size() < options.members) {
        throw DataError(where + ": only " + std::to_string(survivors.size()) + " of " +
                        std::to_string(registry.size()) + " classifiers could be cross-validated, need " +
                        std::to_string(options.members));
    }
    result.selection.ranked = rank_candidates(scored);

    VotingEnsemble& vc = result.ensemble;
    vc.level = 1;
    vc.country = data.provenance.country;
    vc.cycle = result.selection.cycle;
    vc.feature_names = data.feature_names;
    for (std::size_t r = 0; r < options.members; ++r) {
        const auto& pick = result.selection.ranked[r];
        const auto it = std::find_if(survivors.begin(), survivors.end(),
                                     [&](const ClassifierSpec& s) { return s.id() == pick.id; });
        const ClassifierSpec& spec = *it;
        result.selection.chosen.push_back(pick.id);
        const auto grid = options.grids.find(spec.kind);
        if (grid != options.grids.end() && !grid->second.empty()) {
            auto tuned = grid_search(spec, grid->second, data, options.cv, seed);
            vc.member_ids.push_back(tuned.best.id());
            vc.member_hit_rates.push_back(tuned.report.mean_hit_rate);
            vc.models.push_back(std::move(tuned.model));
            result.tuned_reports.push_back(std::move(tuned.report));
        } else {
            const auto& report = *std::find_if(result.cv_reports.begin(), result.cv_reports.end(),
                                               [&](const CvReport& c) { return c.spec == spec; });
            vc.member_ids.push_back(pick.id);
            vc.member_hit_rates.push_back(pick.hit_rate);
            vc.models.push_back(train(spec, data, derive_seed(seed, pick.id, options.cv.folds)));
            result.tuned_reports.push_back(report);
        }
    }
    return result;
}

std::vector<std::size_t> select_qualified(std::span<const double> scores, double threshold,
                                          std::size_t max_members) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::size_t qualified = 0;
    while (qualified < order.size() && scores[order[qualified]] > threshold) ++qualified;
    std::size_t k = std::min(qualified, max_members);
    if (k % 2 == 0 && k > 0) --k;
    order.resize(k);
    return order;
}

Level2Result build_level2(Cycle cycle, std::span<const VotingEnsemble> level1, const Dataset& target,
                          double threshold, std::size_t max_members) {
    const std::string name(to_string(cycle));
    if (level1.empty()) throw DataError("level 2 for " + name + ": no level-1 ensembles");
    if (target.rows() == 0) throw DataError("level 2 for " + name + ": empty target dataset");
    if (max_members == 0 || max_members % 2 == 0) throw DataError("level-2 member limit must be odd");

    Level2Result result;
    result.selection.level = 2;
    result.selection.country = std::string(kCrossCountry);
    result.selection.cycle = cycle;

    std::vector<double> scores;
    std::vector<RankedCandidate> candidates;
    for (const auto& vc : level1) {
        if (vc.cycle != cycle) {
            throw DataError("level 2 for " + name + ": got a level-1 ensemble for " +
                            std::string(to_string(vc.cycle)));
        }
        const double h = hit_rate(vc.vote_rows(target.features), target.labels);
        scores.push_back(h);
        candidates.push_back({vc.country, h});
    }
    result.selection.ranked = rank_candidates(candidates);
    const auto chosen = select_qualified(scores, threshold, max_members);
    if (chosen.empty()) {
        result.selection.rejected = true;
        result.selection.note = "no level-1 ensemble beats the threshold";
        return result;
    }
    if (chosen.size() < std::min(max_members, level1.size())) {
        result.selection.note = std::to_string(chosen.size()) + " member(s) kept after the threshold";
    }
    VotingEnsemble vc;
    vc.level = 2;
    vc.country = std::string(kCrossCountry);
    vc.cycle = cycle;
    vc.feature_names = level1[chosen.front()].feature_names;
    for (auto i : chosen) {
        result.selection.chosen.push_back(level1[i].country);
        vc.member_ids.push_back(level1[i].country);
        vc.member_hit_rates.push_back(scores[i]);
        vc.members.push_back(level1[i]);
    }
    result.ensemble = std::move(vc);
    return result;
}

AggregateReport evaluate_overall(const std::map<Cycle, VotingEnsemble>& level2,
                                 const std::map<Cycle, Dataset>& target) {
    AggregateReport report;
    for (const auto& [cycle, vc] : level2) {
        const auto it = target.find(cycle);
        if (it == target.end() || it->second.rows() == 0) {
            throw DataError("no target data for cycle " + std::string(to_string(cycle)));
        }
        const auto predicted = vc.vote_rows(it->second.features);
        CycleScore s;
        s.total = predicted.size();
        for (std::size_t i = 0; i < predicted.size(); ++i) s.correct += predicted[i] == it->second.labels[i] ? 1 : 0;
        s.hit_rate = static_cast<double>(s.correct) / static_cast<double>(s.total);
        report.correct += s.correct;
        report.total += s.total;
        report.per_cycle[cycle] = s;
    }
    report.overall_hit_rate =
        report.total > 0 ? static_cast<double>(report.correct) / static_cast<double>(report.total) : 0.0;
    return report;
}

} // namespace yieldcycle
