// Spot values were computed independently (Python, IEEE doubles) and frozen.

#include <doctest.h>

#include <algorithm>
#include <span>
#include <vector>

#include "channel.hpp"
#include "error.hpp"
#include "rng.hpp"

using namespace semnet;

TEST_CASE("path loss matches frozen reference points") {
    CHECK(channel::path_loss_db(10.0, 3.5) ==
          doctest::Approx(60.581360887005516).epsilon(1e-12));
    CHECK(channel::path_loss_db(1.0, 1.0) == 32.4);
    CHECK(channel::path_loss_db(100.0, 3.5) ==
          doctest::Approx(77.88136088700551).epsilon(1e-12));
    CHECK(channel::path_loss_db(2.0, 0.7) ==
          doctest::Approx(34.50977972527201).epsilon(1e-12));
}

TEST_CASE("sub-metre distances clamp to one metre") {
    double at_1m = channel::path_loss_db(1.0, 3.5);
    CHECK(at_1m == doctest::Approx(43.28136088700551).epsilon(1e-12));
    CHECK(channel::path_loss_db(0.5, 3.5) == at_1m);
    CHECK(channel::path_loss_db(0.001, 3.5) == at_1m);
}

TEST_CASE("nonpositive distances are rejected") {
    try {
        (void)channel::path_loss_db(0.0, 3.5);
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::non_positive_distance);
    }
    CHECK_THROWS_AS((void)channel::path_loss_db(-2.0, 3.5), Error);
}

TEST_CASE("noise floor at the default radio is -97 dBm") {
    RadioParams r;
    CHECK(channel::noise_dbm(r) == doctest::Approx(-97.0).epsilon(1e-12));
}

TEST_CASE("sinr matches frozen reference points") {
    RadioParams r;
    CHECK(channel::sinr_db(r, 10.0) == doctest::Approx(59.418639112994484).epsilon(1e-12));
    CHECK(channel::sinr_db(r, 100.0) == doctest::Approx(42.11863911299449).epsilon(1e-12));
}

TEST_CASE("interference at the noise floor costs about 3 dB") {
    RadioParams quiet;
    RadioParams noisy;
    noisy.interference_dbm = channel::noise_dbm(noisy);
    double drop = channel::sinr_db(quiet, 25.0) - channel::sinr_db(noisy, 25.0);
    CHECK(drop == doctest::Approx(3.010299956639812).epsilon(1e-9));
}

TEST_CASE("cqi mapping hits the threshold edges") {
    RadioParams r;
    std::span<const double> th(r.cqi_thresholds_db);
    CHECK(channel::sinr_to_cqi(-100.0, th) == 0);
    CHECK(channel::sinr_to_cqi(-6.71, th) == 0);
    CHECK(channel::sinr_to_cqi(-6.7, th) == 1);
    CHECK(channel::sinr_to_cqi(-4.7, th) == 2);
    CHECK(channel::sinr_to_cqi(0.0, th) == 3);
    CHECK(channel::sinr_to_cqi(0.2, th) == 4);
    CHECK(channel::sinr_to_cqi(22.699, th) == 14);
    CHECK(channel::sinr_to_cqi(22.7, th) == 15);
    CHECK(channel::sinr_to_cqi(60.0, th) == 15);
}

TEST_CASE("link quality degrades monotonically with distance") {
    RadioParams r;
    Rng rng(2024);
    std::vector<double> distances;
    for (int i = 0; i < 1000; ++i) distances.push_back(rng.uniform(0.1, 500.0));
    std::sort(distances.begin(), distances.end());
    double prev_pl = -1e9, prev_sinr = 1e9;
    int prev_cqi = 16;
    for (double d : distances) {
        double pl = channel::path_loss_db(d, r.carrier_ghz);
        double s = channel::sinr_db(r, d);
        int cqi = channel::sinr_to_cqi(s, r.cqi_thresholds_db);
        CHECK(pl >= prev_pl);
        CHECK(s <= prev_sinr);
        CHECK(cqi <= prev_cqi);
        prev_pl = pl;
        prev_sinr = s;
        prev_cqi = cqi;
    }
}

TEST_CASE("link_report selects the top MCS near the server") {
    RadioParams r;
    r.server_pos = {50.0, 50.0};
    channel::LinkReport rep = channel::link_report(r, {50.0, 60.0});
    CHECK(rep.distance_m == 10.0);
    CHECK(rep.cqi == 15);
    CHECK(rep.spectral_efficiency == 5.5547);
    CHECK(rep.rate_bps == doctest::Approx(55547000.0).epsilon(1e-12));
}

TEST_CASE("transmit applies the one-step budget rule") {
    channel::LinkReport rep;
    rep.cqi = 15;
    rep.spectral_efficiency = 5.5547;
    rep.rate_bps = 55547000.0;

    channel::TxOutcome ok = channel::transmit(rep, 160, 1.0);
    CHECK(ok.delivered);
    CHECK(ok.bits_counted == 160);
    CHECK(ok.airtime_s == doctest::Approx(160.0 / 55547000.0).epsilon(1e-15));

    // a payload exactly equal to the step budget still fits
    channel::TxOutcome edge = channel::transmit(rep, 55547000, 1.0);
    CHECK(edge.delivered);
    channel::TxOutcome over = channel::transmit(rep, 55547001, 1.0);
    CHECK_FALSE(over.delivered);
    CHECK(over.bits_counted == 0);

    channel::LinkReport dead;
    dead.cqi = 0;
    dead.rate_bps = 0.0;
    channel::TxOutcome out = channel::transmit(dead, 160, 1.0);
    CHECK_FALSE(out.delivered);
    CHECK(out.bits_counted == 0);
    CHECK(out.airtime_s == 0.0);
}

TEST_CASE("every mcs entry yields a usable rate at 10 MHz") {
    RadioParams r;
    for (size_t i = 0; i < r.mcs_table.size(); ++i) {
        double rate = r.mcs_table[i].spectral_efficiency * r.bandwidth_hz;
        CHECK(rate > 1.0e6);
        if (i > 0) {
            CHECK(r.mcs_table[i].spectral_efficiency > r.mcs_table[i - 1].spectral_efficiency);
        }
    }
}
