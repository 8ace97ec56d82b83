#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "compacta/peaks.hpp"
#include "testutil.hpp"

using namespace compacta;
using testutil::ScratchDir;

namespace {

Signal make_signal(std::vector<double> samples, double fs = 100.0) {
    return Signal{std::move(samples), fs, "test"};
}

} // namespace

TEST_CASE("constant signal has no peaks") {
    const Signal sig = make_signal(std::vector<double>(50, 1.0));
    const PeakList peaks = detect_peaks(sig, {0.5, 0.0});
    CHECK(peaks.indices.empty());
}

TEST_CASE("impulse train is detected at every impulse") {
    // oracle: the generator records where it put the impulses
    std::vector<double> samples(1000, 0.0);
    std::vector<std::size_t> expected;
    for (std::size_t i = 50; i < samples.size() - 1; i += 100) {
        samples[i] = 1.0;
        expected.push_back(i);
    }
    const Signal sig = make_signal(std::move(samples));
    const PeakList peaks = detect_peaks(sig, {0.5, 0.0});
    CHECK(peaks.indices == expected);
}

TEST_CASE("refractory keeps only the first of two close peaks") {
    // two peaks 10 samples apart at 100 Hz; refractory 0.2 s = 20 samples
    std::vector<double> samples(40, 0.0);
    samples[10] = 1.0;
    samples[20] = 1.0;
    const Signal sig = make_signal(std::move(samples), 100.0);
    const PeakList peaks = detect_peaks(sig, {0.5, 0.2});
    REQUIRE(peaks.indices.size() == 1);
    CHECK(peaks.indices[0] == 10);
}

TEST_CASE("plateau peaks report their leftmost sample") {
    const Signal sig = make_signal({0.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0});
    const PeakList peaks = detect_peaks(sig, {0.5, 0.0});
    REQUIRE(peaks.indices.size() == 2);
    CHECK(peaks.indices[0] == 1);
    CHECK(peaks.indices[1] == 5);
}

TEST_CASE("signals shorter than 3 samples are rejected") {
    CHECK_THROWS_AS(detect_peaks(make_signal({1.0, 2.0}), {}), numeric_error);
}

TEST_CASE("detection properties on random signals") {
    std::mt19937_64 rng(971231);
    std::uniform_real_distribution<double> amp(-1.0, 2.0);
    std::uniform_real_distribution<double> height(-0.5, 1.0);
    std::uniform_real_distribution<double> refractory(0.0, 0.3);
    std::uniform_int_distribution<std::size_t> length(3, 400);

    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> samples(length(rng));
        for (auto& v : samples) v = amp(rng);
        const double fs = 100.0;
        const PeakDetectConfig cfg{height(rng), refractory(rng)};
        const Signal sig = make_signal(samples, fs);
        const PeakList peaks = detect_peaks(sig, cfg);

        const auto min_gap =
            static_cast<std::size_t>(std::ceil(cfg.refractory_s * fs));
        for (std::size_t k = 0; k < peaks.indices.size(); ++k) {
            const std::size_t i = peaks.indices[k];
            REQUIRE(i >= 1);
            REQUIRE(i + 1 < samples.size());
            REQUIRE(samples[i] > samples[i - 1]);
            REQUIRE(samples[i] >= samples[i + 1]);
            REQUIRE(samples[i] >= cfg.min_height);
            if (k > 0) {
                REQUIRE(peaks.indices[k] > peaks.indices[k - 1]);
                REQUIRE(peaks.indices[k] - peaks.indices[k - 1] >= min_gap);
            }
        }
    }
}

TEST_CASE("read_peaks_csv parses indices in order") {
    ScratchDir dir;
    const auto path = dir.file("p.csv");
    testutil::write_file(path, "100\n200\n300\n");
    const PeakList peaks = read_peaks_csv(path);
    CHECK(peaks.indices == std::vector<std::size_t>{100, 200, 300});
    CHECK(peaks.source_record_id == "p");
}

TEST_CASE("read_peaks_csv accepts the optional index header") {
    ScratchDir dir;
    const auto path = dir.file("ph.csv");
    testutil::write_file(path, "index\n5\n9\n");
    CHECK(read_peaks_csv(path).indices == std::vector<std::size_t>{5, 9});
}

TEST_CASE("read_peaks_csv reports non-increasing rows") {
    ScratchDir dir;
    const auto path = dir.file("bad.csv");
    testutil::write_file(path, "200\n100\n");
    CHECK_THROWS_WITH_AS(read_peaks_csv(path),
                         doctest::Contains("non-increasing at row 2"), io_error);

    const auto dup = dir.file("dup.csv");
    testutil::write_file(dup, "100\n100\n");
    CHECK_THROWS_AS(read_peaks_csv(dup), io_error);
}

TEST_CASE("read_peaks_csv rejects non-integer entries") {
    ScratchDir dir;
    const auto fractional = dir.file("f.csv");
    testutil::write_file(fractional, "1.5\n");
    CHECK_THROWS_AS(read_peaks_csv(fractional), io_error);

    const auto negative = dir.file("n.csv");
    testutil::write_file(negative, "-3\n");
    CHECK_THROWS_AS(read_peaks_csv(negative), io_error);
}

TEST_CASE("read_peaks_csv returns an empty list for an empty file") {
    ScratchDir dir;
    const auto path = dir.file("empty.csv");
    testutil::write_file(path, "");
    CHECK(read_peaks_csv(path).indices.empty());
}
