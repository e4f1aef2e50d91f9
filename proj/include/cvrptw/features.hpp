#pragma once

#include "cvrptw/preprocess.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string_view>

namespace cvrptw
{
    class EpisodeState;

    inline constexpr std::size_t kFeatureCount = 17;

    /// Normalized inputs for one (vehicle, candidate customer) pair, in this order:
    /// d, b_d_short, t, b_t_short, ngb, non_d, c_left, drop_far, drop_cls, drop_long,
    /// served, cls_dem, hops, cls_tim, urgt, dfrac, remote.
    using FeatureVector = std::array<double, kFeatureCount>;

    enum Feature : std::size_t
    {
        kDist,
        kDistShort,
        kTimeGap,
        kTimeShort,
        kSameCluster,
        kNonMemberDist,
        kClusterLeft,
        kDropFar,
        kDropClose,
        kDropLong,
        kServed,
        kClusterDemand,
        kHops,
        kClusterTime,
        kUrgency,
        kDemandFraction,
        kRemote,
    };

    inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
        "d", "b_d_short", "t", "b_t_short", "ngb", "non_d", "c_left", "drop_far", "drop_cls",
        "drop_long", "served", "cls_dem", "hops", "cls_tim", "urgt", "dfrac", "remote"};

    inline constexpr double kDemandEpsilon = 1e-6;
    inline constexpr double kClampLow = -1.0;
    inline constexpr double kClampHigh = 2.0;

    /// Normalizers with degenerate (zero) values replaced by 1.
    struct Normalizers
    {
        double rho = 1.0;
        double tau = 1.0;
        double d_max = 1.0;
        double t_max = 1.0;
        bool degenerate = false;

        static Normalizers from(const PreprocessSummary &summary);
    };

    /// Precondition: (vehicle, customer) is a feasible pair in `state`.
    FeatureVector extract(const EpisodeState &state, int vehicle, int customer);

    /// Throws ContractViolation if the guard relations between indicator features are broken.
    void check_guards(const FeatureVector &f);

    void write_features_csv_header(std::ostream &out);
    void write_features_csv_row(std::ostream &out, std::size_t step, int vehicle, int customer, const FeatureVector &f);
}
