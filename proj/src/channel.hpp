#pragma once

#include <cstdint>
#include <span>

#include "config.hpp"
#include "geometry.hpp"

namespace semnet::channel {

struct LinkReport {
    double distance_m = 0.0;
    double path_loss_db = 0.0;
    double sinr_db = 0.0;
    int cqi = 0;  // 0 = out of range
    double spectral_efficiency = 0.0;
    double rate_bps = 0.0;
};

// InH-Office LOS form: 32.4 + 17.3*log10(d) + 20*log10(fc). Distances below
// 1 m are clamped to 1 m; nonpositive distances are rejected.
double path_loss_db(double distance_m, double carrier_ghz);

// Thermal noise floor: -174 dBm/Hz + 10*log10(BW) + NF.
double noise_dbm(const RadioParams& params);

double sinr_db(const RadioParams& params, double distance_m);

// Largest CQI i in 1..15 with thresholds[i-1] <= sinr, else 0.
int sinr_to_cqi(double sinr, std::span<const double> thresholds);

LinkReport link_report(const RadioParams& params, Vec2 robot_pos);

struct TxOutcome {
    bool delivered = false;
    uint64_t bits_counted = 0;
    double airtime_s = 0.0;
};

// Delivery is error-free once the selected MCS admits the payload within
// one step; an undeliverable payload is retried by the caller.
TxOutcome transmit(const LinkReport& report, uint64_t payload_bits, double step_s);

}  // namespace semnet::channel
