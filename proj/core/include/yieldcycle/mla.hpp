#pragma once

// Three-level meta-learner: per-(country, cycle) voting ensembles of tuned
// classifiers, a cross-country ensemble per cycle chosen on the target
// country's data, and the micro-averaged hit rate over all cycles.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yieldcycle/classifier.hpp"
#include "yieldcycle/cycles.hpp"
#include "yieldcycle/validation.hpp"

namespace yieldcycle {

inline constexpr std::string_view kCrossCountry = "cross-country";

/// Majority vote over an odd number of members. Level-1 members are trained
/// models; level-2 members are level-1 ensembles.
struct VotingEnsemble {
    int level = 1;
    std::string country; // kCrossCountry at level 2
    Cycle cycle = Cycle::MC1;
    std::vector<std::string> feature_names;
    std::vector<TrainedModel> models;
    std::vector<VotingEnsemble> members;
    std::vector<std::string> member_ids;
    std::vector<double> member_hit_rates; // score each member was selected on

    std::size_t size() const { return level == 1 ? models.size() : members.size(); }
    /// Sign of the vote sum. Throws DataError on a dimension mismatch.
    int vote(std::span<const double> x) const;
    std::vector<int> vote_rows(const Eigen::MatrixXd& rows) const;
};

int vote(const VotingEnsemble& ensemble, std::span<const double> x);

struct RankedCandidate {
    std::string id;
    double hit_rate = 0.0;
};

struct SelectionSet {
    int level = 1;
    std::string country; // kCrossCountry at level 2
    Cycle cycle = Cycle::MC1;
    std::vector<RankedCandidate> ranked; // descending, ties in input order
    std::vector<std::string> chosen;
    std::map<std::string, std::string> excluded; // candidate id -> reason
    bool rejected = false;
    std::string note;
};

/// Stable descending ranking; equal scores keep their input order.
std::vector<RankedCandidate> rank_candidates(std::vector<RankedCandidate> candidates);

struct Level1Options {
    CvOptions cv;
    std::map<std::string, Grid> grids = default_grids(); // kinds without a grid are refit as given
    std::size_t members = 3;
};

struct Level1Result {
    VotingEnsemble ensemble;
    SelectionSet selection;
    std::vector<CvReport> cv_reports;     // registry order, surviving specs only
    std::vector<CvReport> tuned_reports;  // winning grid point of each member
};

/// Cross-validates every spec, keeps the top `members`, grid-searches each
/// and votes with the tuned models. Specs whose training fails on this data
/// are excluded; fewer than `members` survivors is a DataError naming the
/// cycle.
Level1Result build_level1(const Dataset& data, std::span<const ClassifierSpec> registry,
                          const Level1Options& options, std::uint64_t seed);

struct Level2Result {
    std::optional<VotingEnsemble> ensemble; // empty when the cycle is rejected
    SelectionSet selection;
};

/// Scores each level-1 ensemble on the whole target subset. Candidates must
/// beat `threshold` strictly; the best k qualifiers are kept, k being the
/// largest odd number <= min(max_members, qualifiers). No qualifiers rejects
/// the cycle.
Level2Result build_level2(Cycle cycle, std::span<const VotingEnsemble> level1, const Dataset& target,
                          double threshold = 0.75, std::size_t max_members = 3);

/// Selection from precomputed scores, used by build_level2. Returns indices
/// into `scores` of the chosen candidates, best first.
std::vector<std::size_t> select_qualified(std::span<const double> scores, double threshold,
                                          std::size_t max_members);

struct CycleScore {
    std::size_t correct = 0;
    std::size_t total = 0;
    double hit_rate = 0.0;
};

struct AggregateReport {
    std::map<Cycle, CycleScore> per_cycle;
    double overall_hit_rate = 0.0; // sum correct / sum total
    std::size_t correct = 0;
    std::size_t total = 0;
    std::vector<Cycle> rejected_cycles;
    std::vector<SelectionSet> selections;
};

/// Votes every target row of each cycle. A cycle with an ensemble but no
/// target dataset is a DataError.
AggregateReport evaluate_overall(const std::map<Cycle, VotingEnsemble>& level2,
                                 const std::map<Cycle, Dataset>& target);

} // namespace yieldcycle
