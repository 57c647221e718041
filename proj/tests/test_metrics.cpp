#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

#include "clfkit/metrics.hpp"
#include "clfkit/rng.hpp"

using namespace clfkit;

namespace {

// The ensemble confusion matrix of the eight-class endoscopy benchmark,
// rows = predicted, columns = actual.
ConfusionMatrix endoscopy8() {
    ConfusionMatrix cm = make_confusion({"A", "B", "C", "D", "E", "F", "G", "H"});
    const long long rows[8][8] = {
        {46, 8, 0, 0, 0, 0, 0, 0},   {4, 42, 0, 0, 0, 0, 0, 0},  {0, 0, 39, 0, 0, 7, 0, 0},
        {0, 0, 0, 50, 0, 0, 1, 0},   {0, 0, 0, 0, 50, 0, 1, 0},  {0, 0, 11, 0, 0, 43, 0, 0},
        {0, 0, 0, 0, 0, 0, 47, 1},   {0, 0, 0, 0, 0, 0, 1, 49},
    };
    for (int p = 0; p < 8; ++p) {
        for (int a = 0; a < 8; ++a) {
            cm.at(p, a) = rows[p][a];
        }
    }
    return cm;
}

ConfusionMatrix random_matrix(Rng& rng, int max_labels = 10) {
    const int n = 2 + static_cast<int>(rng.uniform_below(max_labels - 1));
    ConfusionMatrix cm = make_confusion(index_labels(n));
    long long total = 0;
    for (long long& c : cm.counts) {
        c = static_cast<long long>(rng.uniform_below(20));
        total += c;
    }
    if (total == 0) {
        cm.at(0, 0) = 1;
    }
    return cm;
}

ConfusionMatrix diagonal_matrix(int n, long long value) {
    ConfusionMatrix cm = make_confusion(index_labels(n));
    for (int i = 0; i < n; ++i) {
        cm.at(i, i) = value;
    }
    return cm;
}

}  // namespace

TEST_CASE("confusion_from_predictions counts directly") {
    const std::vector<PredictionRecord> records = {{0, 0, 0}, {1, 0, 1}, {2, 1, 1}};
    const ConfusionMatrix cm = confusion_from_predictions(records, 2);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(0, 1) == 1);
    CHECK(cm.at(1, 0) == 0);
    CHECK(cm.at(1, 1) == 1);
    CHECK(cm.total() == 3);
}

TEST_CASE("confusion_from_predictions of no records is all-zero and metrics reject it") {
    const ConfusionMatrix cm = confusion_from_predictions({}, 3);
    CHECK(cm.total() == 0);
    CHECK_THROWS_AS(accuracy(cm), std::invalid_argument);
    CHECK_THROWS_AS(per_label_prf(cm), std::invalid_argument);
}

TEST_CASE("confusion_from_predictions rejects out-of-range indices") {
    CHECK_THROWS_AS(confusion_from_predictions({{0, 2, 0}}, 2), std::invalid_argument);
    CHECK_THROWS_AS(confusion_from_predictions({{0, 0, -1}}, 2), std::invalid_argument);
}

TEST_CASE("400 records reconstruct the benchmark matrix") {
    const ConfusionMatrix want = endoscopy8();
    std::vector<PredictionRecord> records;
    int id = 0;
    for (int p = 0; p < 8; ++p) {
        for (int a = 0; a < 8; ++a) {
            for (long long k = 0; k < want.at(p, a); ++k) {
                records.push_back({id++, p, a});
            }
        }
    }
    REQUIRE(records.size() == 400);
    ConfusionMatrix got = confusion_from_predictions(records, 8);
    got.labels = want.labels;
    CHECK(got.counts == want.counts);
}

TEST_CASE("per-label metrics of the benchmark class D") {
    const std::vector<PerLabelMetrics> per = per_label_prf(endoscopy8());
    CHECK(per[3].precision == Catch::Approx(50.0 / 51.0).epsilon(1e-12));
    CHECK(per[3].recall == 1.0);
    CHECK(per[3].support == 50);
}

TEST_CASE("diagonal matrix scores perfectly") {
    const ConfusionMatrix cm = diagonal_matrix(4, 5);
    for (const PerLabelMetrics& m : per_label_prf(cm)) {
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == 1.0);
    }
    CHECK(accuracy(cm) == 1.0);
    const MccResult mcc = mcc_multiclass(cm);
    CHECK(mcc.defined);
    CHECK(mcc.value == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("label never predicted and never present resolves 0/0 to 0") {
    ConfusionMatrix cm = make_confusion(index_labels(3));
    cm.at(0, 0) = 2;
    cm.at(1, 1) = 3;  // label 2 nowhere
    const std::vector<PerLabelMetrics> per = per_label_prf(cm);
    CHECK(per[2].precision == 0.0);
    CHECK(per[2].recall == 0.0);
    CHECK(per[2].f1 == 0.0);
    CHECK(per[2].zero_division);
    CHECK_FALSE(per[0].zero_division);
}

TEST_CASE("benchmark micro average is 0.915 on the nose") {
    const PrfAverage micro = micro_prf(endoscopy8());
    CHECK(micro.precision == Catch::Approx(0.915).epsilon(1e-12));
    CHECK(micro.recall == Catch::Approx(0.915).epsilon(1e-12));
    CHECK(micro.f1 == Catch::Approx(0.915).epsilon(1e-12));
    CHECK(accuracy(endoscopy8()) == Catch::Approx(0.915).epsilon(1e-12));
}

TEST_CASE("benchmark macro and weighted recall both equal 0.915 (equal supports)") {
    // oracle: the eight per-label recalls averaged by hand
    const double recalls[8] = {0.92, 0.84, 0.78, 1.0, 1.0, 0.86, 0.94, 0.98};
    const double mean = std::accumulate(recalls, recalls + 8, 0.0) / 8.0;
    CHECK(mean == Catch::Approx(0.915).epsilon(1e-12));
    CHECK(macro_prf(endoscopy8()).recall == Catch::Approx(mean).epsilon(1e-12));
    CHECK(weighted_prf(endoscopy8()).recall == Catch::Approx(mean).epsilon(1e-12));
}

TEST_CASE("benchmark macro precision and F1 match the row-wise oracle") {
    // oracle: per-label ratios taken straight off the matrix entries
    const double precisions[8] = {46.0 / 54, 42.0 / 46, 39.0 / 46, 50.0 / 51,
                                  50.0 / 51, 43.0 / 54, 47.0 / 48, 49.0 / 50};
    const double recalls[8] = {0.92, 0.84, 0.78, 1.0, 1.0, 0.86, 0.94, 0.98};
    const double mean_p = std::accumulate(precisions, precisions + 8, 0.0) / 8.0;
    CHECK(mean_p == Catch::Approx(0.9161210867197121).epsilon(1e-12));
    CHECK(macro_prf(endoscopy8()).precision == Catch::Approx(mean_p).epsilon(1e-12));

    double mean_f1 = 0.0;
    for (int l = 0; l < 8; ++l) {
        mean_f1 += 2.0 * precisions[l] * recalls[l] / (precisions[l] + recalls[l]) / 8.0;
    }
    CHECK(mean_f1 == Catch::Approx(0.9148025193512290).epsilon(1e-12));
    CHECK(macro_prf(endoscopy8()).f1 == Catch::Approx(mean_f1).epsilon(1e-12));
}

TEST_CASE("samples averaging counts exact matches") {
    const std::vector<PredictionRecord> all_correct = {{0, 1, 1}, {1, 0, 0}, {2, 2, 2}};
    const PrfAverage a = samples_prf(all_correct);
    CHECK(a.precision == 1.0);
    CHECK(a.recall == 1.0);
    CHECK(a.f1 == 1.0);

    const std::vector<PredictionRecord> three_of_four = {{0, 1, 1}, {1, 0, 0}, {2, 2, 2}, {3, 0, 1}};
    const PrfAverage b = samples_prf(three_of_four);
    CHECK(b.precision == 0.75);
    CHECK(b.recall == 0.75);
    CHECK(b.f1 == 0.75);
}

TEST_CASE("samples averaging rejects duplicate sample ids") {
    CHECK_THROWS_AS(samples_prf({{5, 0, 0}, {5, 1, 1}}), std::invalid_argument);
}

TEST_CASE("samples equals micro for single-label records") {
    Rng rng(303);
    for (int iter = 0; iter < 100; ++iter) {
        const int n_labels = 2 + static_cast<int>(rng.uniform_below(6));
        const int n = 1 + static_cast<int>(rng.uniform_below(50));
        std::vector<PredictionRecord> records;
        for (int i = 0; i < n; ++i) {
            records.push_back({i, static_cast<int>(rng.uniform_below(n_labels)),
                               static_cast<int>(rng.uniform_below(n_labels))});
        }
        const PrfAverage samples = samples_prf(records);
        const PrfAverage micro = micro_prf(confusion_from_predictions(records, n_labels));
        CHECK(samples.precision == Catch::Approx(micro.precision).margin(1e-12));
        CHECK(samples.f1 == Catch::Approx(micro.f1).margin(1e-12));
    }
}

TEST_CASE("accuracy of identity and anti-diagonal matrices") {
    CHECK(accuracy(diagonal_matrix(3, 1)) == 1.0);
    ConfusionMatrix anti = make_confusion(index_labels(3));
    anti.at(0, 2) = 4;
    anti.at(1, 1) = 0;
    anti.at(2, 0) = 4;
    anti.at(0, 1) = 1;
    CHECK(accuracy(anti) == 0.0);
}

TEST_CASE("benchmark MCC is 0.903") {
    const MccResult mcc = mcc_multiclass(endoscopy8());
    CHECK(mcc.defined);
    CHECK(mcc.value == Catch::Approx(0.903).margin(1e-3));
    // frozen value from the closed-form oracle: 126400 / sqrt(139930 * 140000)
    const double oracle = 126400.0 / std::sqrt(139930.0 * 140000.0);
    CHECK(mcc.value == Catch::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("multiclass MCC reduces to binary MCC on 2x2 matrices") {
    Rng rng(909);
    for (int iter = 0; iter < 200; ++iter) {
        ConfusionMatrix cm = make_confusion(index_labels(2));
        // orientation: counts[pred][act]; class 1 plays "positive"
        const double tn = static_cast<double>(cm.at(0, 0) = 1 + rng.uniform_below(30));
        const double fn = static_cast<double>(cm.at(0, 1) = rng.uniform_below(30));
        const double fp = static_cast<double>(cm.at(1, 0) = rng.uniform_below(30));
        const double tp = static_cast<double>(cm.at(1, 1) = 1 + rng.uniform_below(30));
        const double denom =
            std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
        const MccResult got = mcc_multiclass(cm);
        if (denom == 0.0) {
            CHECK_FALSE(got.defined);
        } else {
            const double binary = (tp * tn - fp * fn) / denom;
            CHECK(got.value == Catch::Approx(binary).margin(1e-12));
        }
    }
}

TEST_CASE("MCC with degenerate marginals is flagged undefined") {
    ConfusionMatrix cm = make_confusion(index_labels(2));
    cm.at(0, 0) = 5;  // everything predicted 0, everything actually 0
    const MccResult mcc = mcc_multiclass(cm);
    CHECK_FALSE(mcc.defined);
    CHECK(mcc.value == 0.0);
}

TEST_CASE("report assembles all components consistently") {
    Rng rng(1212);
    for (int iter = 0; iter < 50; ++iter) {
        const ConfusionMatrix cm = random_matrix(rng, 4);
        const MetricsReport rep = report(cm);
        // independent recomputation straight from the definitions
        const int n = cm.num_labels();
        double macro_p = 0.0;
        for (int l = 0; l < n; ++l) {
            const long long rs = cm.row_sum(l);
            macro_p += rs == 0 ? 0.0 : static_cast<double>(cm.at(l, l)) / rs;
        }
        macro_p /= n;
        CHECK(rep.macro.precision == Catch::Approx(macro_p).margin(1e-12));
        CHECK(rep.accuracy ==
              Catch::Approx(static_cast<double>(cm.diagonal_sum()) / cm.total()).margin(1e-12));
        CHECK_FALSE(rep.samples.has_value());
        REQUIRE(rep.per_label.size() == static_cast<std::size_t>(n));
    }
    const MetricsReport perfect = report(diagonal_matrix(5, 3));
    CHECK(perfect.micro.f1 == 1.0);
    CHECK(perfect.macro.f1 == 1.0);
    CHECK(perfect.weighted.f1 == 1.0);
    CHECK(perfect.mcc.value == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: micro precision = recall = F1 = accuracy") {
    Rng rng(1515);
    for (int iter = 0; iter < 1000; ++iter) {
        const ConfusionMatrix cm = random_matrix(rng);
        const PrfAverage micro = micro_prf(cm);
        const double acc = accuracy(cm);
        CHECK(micro.precision == acc);
        CHECK(micro.recall == acc);
        CHECK(micro.f1 == Catch::Approx(acc).margin(1e-12));
    }
}

TEST_CASE("property: weighted equals macro when supports are equal") {
    Rng rng(1616);
    for (int iter = 0; iter < 300; ++iter) {
        const int n = 2 + static_cast<int>(rng.uniform_below(5));
        const long long support = 5 + static_cast<long long>(rng.uniform_below(20));
        ConfusionMatrix cm = make_confusion(index_labels(n));
        // fill each column to the same total
        for (int a = 0; a < n; ++a) {
            long long remaining = support;
            for (int p = 0; p < n - 1; ++p) {
                const long long take = static_cast<long long>(rng.uniform_below(remaining + 1));
                cm.at(p, a) = take;
                remaining -= take;
            }
            cm.at(n - 1, a) = remaining;
        }
        const PrfAverage macro = macro_prf(cm);
        const PrfAverage weighted = weighted_prf(cm);
        CHECK(weighted.precision == Catch::Approx(macro.precision).margin(1e-12));
        CHECK(weighted.recall == Catch::Approx(macro.recall).margin(1e-12));
        CHECK(weighted.f1 == Catch::Approx(macro.f1).margin(1e-12));
    }
}

TEST_CASE("property: MCC is invariant under transposition") {
    Rng rng(1717);
    for (int iter = 0; iter < 500; ++iter) {
        const ConfusionMatrix cm = random_matrix(rng);
        ConfusionMatrix t = cm;
        for (int p = 0; p < cm.num_labels(); ++p) {
            for (int a = 0; a < cm.num_labels(); ++a) {
                t.at(a, p) = cm.at(p, a);
            }
        }
        const MccResult m1 = mcc_multiclass(cm);
        const MccResult m2 = mcc_multiclass(t);
        CHECK(m1.defined == m2.defined);
        CHECK(m1.value == Catch::Approx(m2.value).margin(1e-12));
    }
}

TEST_CASE("property: permuting labels permutes per-label results, averages unchanged") {
    Rng rng(1818);
    for (int iter = 0; iter < 100; ++iter) {
        const ConfusionMatrix cm = random_matrix(rng, 6);
        const int n = cm.num_labels();
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) {
            std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
        }
        ConfusionMatrix pcm = make_confusion(index_labels(n));
        for (int p = 0; p < n; ++p) {
            for (int a = 0; a < n; ++a) {
                pcm.at(perm[p], perm[a]) = cm.at(p, a);
            }
        }
        const std::vector<PerLabelMetrics> base = per_label_prf(cm);
        const std::vector<PerLabelMetrics> permuted = per_label_prf(pcm);
        for (int l = 0; l < n; ++l) {
            CHECK(permuted[perm[l]].precision == base[l].precision);
            CHECK(permuted[perm[l]].recall == base[l].recall);
            CHECK(permuted[perm[l]].support == base[l].support);
        }
        CHECK(macro_prf(pcm).f1 == Catch::Approx(macro_prf(cm).f1).margin(1e-12));
        CHECK(weighted_prf(pcm).f1 == Catch::Approx(weighted_prf(cm).f1).margin(1e-12));
        CHECK(micro_prf(pcm).f1 == Catch::Approx(micro_prf(cm).f1).margin(1e-12));
        const MccResult m1 = mcc_multiclass(cm);
        const MccResult m2 = mcc_multiclass(pcm);
        CHECK(m1.value == Catch::Approx(m2.value).margin(1e-12));
    }
}

TEST_CASE("property: all averaged values stay inside [0,1]") {
    Rng rng(1919);
    for (int iter = 0; iter < 300; ++iter) {
        const ConfusionMatrix cm = random_matrix(rng);
        const MetricsReport rep = report(cm);
        for (const PrfAverage* avg : {&rep.micro, &rep.macro, &rep.weighted}) {
            CHECK(avg->precision >= 0.0);
            CHECK(avg->precision <= 1.0);
            CHECK(avg->recall >= 0.0);
            CHECK(avg->recall <= 1.0);
            CHECK(avg->f1 >= 0.0);
            CHECK(avg->f1 <= 1.0);
        }
        CHECK(rep.accuracy >= 0.0);
        CHECK(rep.accuracy <= 1.0);
        CHECK(rep.mcc.value >= -1.0 - 1e-12);
        CHECK(rep.mcc.value <= 1.0 + 1e-12);
    }
}

TEST_CASE("confusion CSV round-trips") {
    const ConfusionMatrix cm = endoscopy8();
    std::ostringstream out;
    write_confusion_csv(out, cm);
    std::istringstream in(out.str());
    const ConfusionMatrix back = read_confusion_csv(in);
    CHECK(back.labels == cm.labels);
    CHECK(back.counts == cm.counts);
}

TEST_CASE("confusion CSV parser reports line numbers") {
    const auto message_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_confusion_csv(in);
        } catch (const std::runtime_error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message_of("bogus header\nA,B\n1,0\n0,1\n").find("line 1") != std::string::npos);
    CHECK(message_of("# rows=predicted cols=actual\nA,B\n1,0,9\n0,1\n").find("line 3") !=
          std::string::npos);
    CHECK(message_of("# rows=predicted cols=actual\nA,B\n1,x\n0,1\n").find("line 3") !=
          std::string::npos);
    CHECK(message_of("# rows=predicted cols=actual\nA,B\n1,0\n").find("line 4") !=
          std::string::npos);
    CHECK(message_of("# rows=predicted cols=actual\nA,B\n1,-2\n0,1\n").find("line 3") !=
          std::string::npos);
}
