#include "channel.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace semnet::channel {

double path_loss_db(double distance_m, double carrier_ghz) {
    if (!(distance_m > 0.0)) {
        fail(Errc::non_positive_distance, "path loss requires a positive distance");
    }
    double d = std::max(distance_m, 1.0);
    return 32.4 + 17.3 * std::log10(d) + 20.0 * std::log10(carrier_ghz);
}

double noise_dbm(const RadioParams& params) {
    return -174.0 + 10.0 * std::log10(params.bandwidth_hz) + params.noise_figure_db;
}

double sinr_db(const RadioParams& params, double distance_m) {
    double pl = path_loss_db(distance_m, params.carrier_ghz);
    double noise = noise_dbm(params);
    double denom_dbm;
    if (params.interference_dbm) {
        denom_dbm = 10.0 * std::log10(std::pow(10.0, noise / 10.0) +
                                      std::pow(10.0, *params.interference_dbm / 10.0));
    } else {
        denom_dbm = noise;
    }
    return params.tx_power_dbm - pl - denom_dbm;
}

int sinr_to_cqi(double sinr, std::span<const double> thresholds) {
    if (thresholds.size() != 15) {
        fail(Errc::bad_table, "expected 15 CQI thresholds");
    }
    for (size_t i = 1; i < thresholds.size(); ++i) {
        if (!(thresholds[i - 1] < thresholds[i])) {
            fail(Errc::bad_table, "CQI thresholds must be strictly ascending");
        }
    }
    int cqi = 0;
    for (size_t i = 0; i < thresholds.size(); ++i) {
        if (sinr >= thresholds[i]) {
            cqi = static_cast<int>(i) + 1;
        } else {
            break;
        }
    }
    return cqi;
}

LinkReport link_report(const RadioParams& params, Vec2 robot_pos) {
    LinkReport report;
    report.distance_m = std::max(distance(robot_pos, params.server_pos), 1.0);
    report.path_loss_db = path_loss_db(report.distance_m, params.carrier_ghz);
    report.sinr_db = sinr_db(params, report.distance_m);
    report.cqi = sinr_to_cqi(report.sinr_db, params.cqi_thresholds_db);
    if (report.cqi >= 1) {
        report.spectral_efficiency = params.mcs_table.at(report.cqi - 1).spectral_efficiency;
        report.rate_bps = report.spectral_efficiency * params.bandwidth_hz;
    }
    return report;
}

TxOutcome transmit(const LinkReport& report, uint64_t payload_bits, double step_s) {
    TxOutcome out;
    if (report.cqi >= 1 && static_cast<double>(payload_bits) <= report.rate_bps * step_s) {
        out.delivered = true;
        out.bits_counted = payload_bits;
    }
    out.airtime_s = report.rate_bps > 0.0 ? static_cast<double>(payload_bits) / report.rate_bps : 0.0;
    return out;
}

}  // namespace semnet::channel
