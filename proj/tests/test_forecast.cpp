#include <gtest/gtest.h>

#include "critprog/forecast.hpp"
#include "critprog/synthgen.hpp"
#include "support/expect_error.hpp"
#include "support/instances.hpp"

using namespace critprog;

namespace {

TemporalMatrix worked() {
    return parse_matrix(
        "year,incidence,jan_temp\n"
        "2001,10,5\n2002,3,4\n2003,9,6\n2004,2,1\n2005,8,7\n2006,4,5.5\n");
}

BacktestConfig config(EvalMode mode, double q = 0.75) {
    BacktestConfig c;
    c.mode = mode;
    c.rule = QuorumRule(q);
    return c;
}

}  // namespace

TEST(SelectThreshold, LargestValueKeepingMinCritical) {
    const std::vector<double> inc{10, 3, 9, 2, 8, 4};
    const auto c = select_threshold(inc, 2);
    EXPECT_EQ(c.value, 9.0);
    EXPECT_EQ(c.source, ThresholdSource::selected);
    EXPECT_EQ(select_threshold(inc, 3).value, 8.0);
    EXPECT_EQ(select_threshold(inc, 6).value, 2.0);
    EXPECT_EQ(select_threshold(worked(), 2).value, 9.0);
}

TEST(SelectThreshold, ConstantSeries) {
    auto m = parse_matrix("year,incidence,a\n1,5,0\n2,5,0\n3,5,0\n4,5,0\n");
    const auto c = select_threshold(m, 2);
    EXPECT_EQ(c.value, 5.0);
    EXPECT_EQ(label_critical(m, c).n_critical(), 4u);
}

TEST(SelectThreshold, Guards) {
    const std::vector<double> one{7.0};
    EXPECT_CRITPROG_ERROR(select_threshold(one, 2), ErrorCode::InsufficientYears);
    EXPECT_CRITPROG_ERROR(select_threshold(worked(), 7), ErrorCode::InsufficientYears);
    EXPECT_CRITPROG_ERROR(select_threshold(worked(), 1), ErrorCode::InvalidConfig);
}

TEST(SelectThreshold, ExtremalProperty) {
    testkit::InstanceGen gen(21);
    for (int i = 0; i < 500; ++i) {
        auto m = gen.matrix();
        const auto k = static_cast<std::size_t>(gen.uniform_int(2, static_cast<int>(m.n_years())));
        const auto c = select_threshold(m, k);
        ASSERT_GE(label_critical(m, c).n_critical(), k);
        for (double v : m.incidence())
            if (v > c.value) ASSERT_LT(label_critical(m, CriticalThreshold::expert(v)).n_critical(), k);
    }
}

TEST(ForecastNext, InsideIntervalIsCritical) {
    auto m = worked();
    auto labels = label_critical(m, CriticalThreshold::expert(8));
    const auto s = FactorSelection::all(m);
    auto f = forecast_next(m, labels, s, QuorumRule(1.0), {{"jan_temp", 6.5}});
    EXPECT_EQ(f.prediction, Prediction::critical);
    EXPECT_EQ(f.membership, 1u);
    EXPECT_EQ(forecast_next(m, labels, s, QuorumRule(1.0), {{"jan_temp", 7.01}}).prediction,
              Prediction::non_critical);
    EXPECT_CRITPROG_ERROR(forecast_next(m, labels, s, QuorumRule(1.0), {{"other", 6.5}}),
                          ErrorCode::MissingFactorValue);
}

TEST(ForecastNext, TooFewCriticalYearsGivesNoForecast) {
    auto m = worked();
    const auto s = FactorSelection::all(m);
    for (double c : {100.0, 10.0}) {
        auto labels = label_critical(m, CriticalThreshold::expert(c));
        auto f = forecast_next(m, labels, s, QuorumRule(1.0), {{"jan_temp", 5}});
        EXPECT_EQ(f.prediction, Prediction::no_forecast) << c;
        EXPECT_FALSE(f.membership);
    }
    auto labels = label_critical(m, CriticalThreshold::expert(9));
    EXPECT_EQ(forecast_next(m, labels, s, QuorumRule(1.0), {{"jan_temp", 5}}).prediction,
              Prediction::critical);
}

TEST(ForecastNext, NoiselessPlantedVerdictsMatchTruth) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        PlantSpec spec;
        spec.seed = seed;
        const auto d = generate(spec);
        const auto labels = label_critical(d.matrix, CriticalThreshold::expert(spec.threshold));
        ASSERT_EQ(labels.flags(), d.truth.is_critical);
        const auto s = FactorSelection::all(d.matrix);
        for (std::size_t t = 5; t < d.matrix.n_years(); ++t) {
            auto f = forecast_next(d.matrix.slice(0, t), labels.slice(0, t), s, QuorumRule(0.75),
                                   d.matrix.row_values(t));
            if (f.prediction == Prediction::no_forecast) continue;
            ASSERT_EQ(f.prediction == Prediction::critical, d.truth.is_critical[t])
                << "seed " << seed << " row " << t;
        }
    }
}

TEST(RollingBacktest, WorkedExampleRolling) {
    // Origins 2004..2006 with min_train_years 3. Training on 2001-2003 gives
    // [5, 6]; 2004 (1) misses. 2005 (7) misses [5, 6] but is critical.
    // Training on 2001-2005 gives [5, 7]; 2006 (5.5) is a false critical.
    auto m = worked();
    auto labels = label_critical(m, CriticalThreshold::expert(8));
    auto cfg = config(EvalMode::rolling, 1.0);
    cfg.min_train_years = 3;
    auto r = rolling_backtest(m, labels, FactorSelection::all(m), cfg);
    ASSERT_EQ(r.verdicts.size(), 3u);
    EXPECT_EQ(r.verdicts[0], (Verdict{2004, Prediction::non_critical, 0u, false}));
    EXPECT_EQ(r.verdicts[1], (Verdict{2005, Prediction::non_critical, 0u, true}));
    EXPECT_EQ(r.verdicts[2], (Verdict{2006, Prediction::critical, 1u, false}));
    EXPECT_EQ(r.x, 0u);
    EXPECT_EQ(r.y, 1u);
    EXPECT_EQ(r.p, 0.0);
    EXPECT_EQ(r.flagged_years(), (std::vector<int>{2006}));
}

TEST(RollingBacktest, CriticalsOnlyAtTheEndGiveNoForecasts) {
    auto m = parse_matrix(
        "year,incidence,a\n1,1,1\n2,1,2\n3,1,3\n4,1,4\n5,1,5\n6,1,6\n7,9,7\n8,9,8\n");
    auto labels = label_critical(m, CriticalThreshold::expert(9));
    auto r = rolling_backtest(m, labels, FactorSelection::all(m), config(EvalMode::rolling));
    ASSERT_EQ(r.verdicts.size(), 3u);
    for (const auto& v : r.verdicts) EXPECT_EQ(v.prediction, Prediction::no_forecast);
    EXPECT_EQ(r.n_no_forecast, 3u);
    EXPECT_FALSE(r.p);
    EXPECT_EQ(r.x + r.y, 0u);
}

TEST(RollingBacktest, InSampleAgreesWithEvaluateInsample) {
    testkit::InstanceGen gen(22);
    int compared = 0;
    for (int i = 0; i < 500; ++i) {
        auto inst = gen.instance();
        if (inst.labels.n_critical() < 2) continue;
        BacktestConfig cfg;
        cfg.mode = EvalMode::in_sample;
        cfg.rule = inst.rule;
        auto bt = rolling_backtest(inst.matrix, inst.labels, inst.selection, cfg);
        auto ev = evaluate_insample(inst.matrix, inst.labels,
                                    build_profile(inst.matrix, inst.labels, inst.selection), inst.rule);
        ASSERT_EQ(bt.flagged_years(), ev.flagged_years);
        ASSERT_EQ(bt.x, ev.x);
        ASSERT_EQ(bt.y, ev.y);
        ASSERT_EQ(bt.p, ev.p);
        ASSERT_EQ(bt.n_no_forecast, 0u);
        for (std::size_t t = 0; t < bt.verdicts.size(); ++t)
            ASSERT_EQ(bt.verdicts[t].membership, ev.membership[t].count);
        ++compared;
    }
    EXPECT_GT(compared, 300);
}

TEST(RollingBacktest, LeaveOneOutMatchesManualHoldout) {
    testkit::InstanceGen gen(23);
    for (int i = 0; i < 300; ++i) {
        auto inst = gen.instance();
        BacktestConfig cfg;
        cfg.mode = EvalMode::leave_one_out;
        cfg.rule = inst.rule;
        auto r = rolling_backtest(inst.matrix, inst.labels, inst.selection, cfg);
        ASSERT_EQ(r.verdicts.size(), inst.matrix.n_years());
        for (std::size_t t = 0; t < inst.matrix.n_years(); ++t) {
            // Remove row t by hand and train on the rest.
            std::vector<int> years;
            std::vector<double> inc;
            std::vector<std::vector<double>> cols(inst.matrix.n_factors());
            std::vector<bool> flags;
            for (std::size_t r2 = 0; r2 < inst.matrix.n_years(); ++r2) {
                if (r2 == t) continue;
                years.push_back(inst.matrix.years()[r2]);
                inc.push_back(inst.matrix.incidence()[r2]);
                flags.push_back(inst.labels[r2]);
                for (std::size_t f = 0; f < inst.matrix.n_factors(); ++f)
                    cols[f].push_back(inst.matrix.value(r2, f));
            }
            if (years.size() < 3) continue;
            TemporalMatrix rest(years, inc, inst.matrix.factor_names(), cols);
            CriticalLabels rest_labels(flags, inst.labels.threshold());
            auto f = forecast_next(rest, rest_labels, inst.selection, inst.rule,
                                   inst.matrix.row_values(t));
            ASSERT_EQ(r.verdicts[t].prediction, f.prediction);
            ASSERT_EQ(r.verdicts[t].membership, f.membership);
        }
    }
}

TEST(RollingBacktest, AggregationInvariants) {
    testkit::InstanceGen gen(24);
    for (int i = 0; i < 500; ++i) {
        auto inst = gen.instance();
        BacktestConfig cfg;
        cfg.rule = inst.rule;
        cfg.min_train_years = static_cast<std::size_t>(gen.uniform_int(3, 6));
        cfg.mode = static_cast<EvalMode>(gen.uniform_int(0, 2));
        auto r = rolling_backtest(inst.matrix, inst.labels, inst.selection, cfg);
        std::size_t crit = 0, none = 0;
        for (const auto& v : r.verdicts) {
            crit += v.prediction == Prediction::critical;
            none += v.prediction == Prediction::no_forecast;
            ASSERT_EQ(v.prediction == Prediction::no_forecast, !v.membership.has_value());
        }
        ASSERT_EQ(r.x + r.y, crit);
        ASSERT_EQ(r.n_no_forecast, none);
        ASSERT_EQ(r.p.has_value(), crit > 0);
        if (r.p) ASSERT_EQ(*r.p, static_cast<double>(r.x) / static_cast<double>(r.x + r.y));
    }
}

TEST(BacktestConfig, Validation) {
    auto m = worked();
    auto labels = label_critical(m, CriticalThreshold::expert(8));
    BacktestConfig cfg;
    cfg.min_train_critical = 1;
    EXPECT_CRITPROG_ERROR(rolling_backtest(m, labels, FactorSelection::all(m), cfg),
                          ErrorCode::InvalidConfig);
    cfg = {};
    cfg.min_train_years = 2;
    EXPECT_CRITPROG_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
    cfg = {};
    cfg.widen_eps = -1;
    EXPECT_CRITPROG_ERROR(cfg.validate(), ErrorCode::InvalidConfig);
    EXPECT_EQ(parse_eval_mode("leave_one_out"), EvalMode::leave_one_out);
    EXPECT_CRITPROG_ERROR(parse_eval_mode("future"), ErrorCode::InvalidConfig);
}

TEST(ClassifyRows, TruthOnlyWhenIncidenceIsPresent) {
    IntervalProfile p{{{"jan_temp", 5, 7, 0}}, 3};
    auto with = parse_factor_rows("year,incidence,jan_temp\n2007,9,6\n2008,1,6.5\n2009,9,2\n");
    auto r = classify_rows(p, QuorumRule(1.0), CriticalThreshold::expert(8), with);
    EXPECT_EQ(r.flagged_years(), (std::vector<int>{2007, 2008}));
    EXPECT_EQ(r.x, 1u);
    EXPECT_EQ(r.y, 1u);
    EXPECT_EQ(r.p, 0.5);
    auto without = parse_factor_rows("year,jan_temp\n2007,6\n");
    auto r2 = classify_rows(p, QuorumRule(1.0), CriticalThreshold::expert(8), without);
    EXPECT_EQ(r2.verdicts[0].prediction, Prediction::critical);
    EXPECT_FALSE(r2.verdicts[0].truth);
    EXPECT_FALSE(r2.p);
}
