// End-to-end acceptance checks. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "agent.hpp"
#include "channel.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "neural.hpp"
#include "pathplan.hpp"
#include "rng.hpp"
#include "semcom.hpp"
#include "sim.hpp"
#include "world.hpp"

using namespace semnet;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::cout << "[" << index << "/8] " << (pass ? "PASS" : "FAIL") << "  " << name << ": "
              << detail << "\n";
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << v;
    return os.str();
}

// ---- training fixture shared by several criteria ----

struct Fixture {
    LabeledImageSet train = generate_digits(11, 2000);
    LabeledImageSet test = generate_digits(12, 500);
    sim::Models models;
    std::vector<double> vae_epoch_loss;

    Fixture() {
        models.classifier = neural::make_classifier(1);
        neural::TrainOptions copts;
        copts.epochs = 5;
        copts.lr = 0.05;
        copts.seed = 1;
        neural::train_classifier(models.classifier, train, copts);

        models.vae = neural::make_vae(2);
        neural::TrainOptions vopts;
        vopts.epochs = 5;
        vopts.lr = 1e-3;
        vopts.seed = 2;
        vae_epoch_loss = neural::train_vae(models.vae, train, vopts).epoch_loss;
    }
};

// ---- criterion 3 oracle: plain Dijkstra over the same movement rules ----

struct OracleResult {
    bool reachable = false;
    double cost = 0.0;
};

OracleResult dijkstra(const pathplan::OccupancyGrid& grid, pathplan::Cell start,
                      pathplan::Cell goal) {
    if (grid.is_blocked(start) || grid.is_blocked(goal)) return {};
    auto idx = [&](pathplan::Cell c) { return static_cast<size_t>(c.row) * grid.cols + c.col; };
    // Carry integer step counts so equal-cost paths compare bit-identically.
    struct Counts {
        int orth = 0, diag = 0;
    };
    std::vector<double> dist(static_cast<size_t>(grid.rows) * grid.cols,
                             std::numeric_limits<double>::infinity());
    std::vector<Counts> best(dist.size());
    using Entry = std::pair<double, pathplan::Cell>;
    auto cmp = [](const Entry& a, const Entry& b) { return a.first > b.first; };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> open(cmp);
    dist[idx(start)] = 0.0;
    open.push({0.0, start});
    while (!open.empty()) {
        auto [d, cur] = open.top();
        open.pop();
        if (d > dist[idx(cur)]) continue;
        if (cur == goal) return {true, d};
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                pathplan::Cell next{cur.row + dr, cur.col + dc};
                if (!grid.in_bounds(next) || grid.is_blocked(next)) continue;
                if (dr != 0 && dc != 0 && (grid.is_blocked({cur.row + dr, cur.col}) ||
                                           grid.is_blocked({cur.row, cur.col + dc}))) {
                    continue;
                }
                Counts nc = best[idx(cur)];
                (dr != 0 && dc != 0) ? ++nc.diag : ++nc.orth;
                double nd = nc.orth + nc.diag * std::sqrt(2.0);
                if (nd < dist[idx(next)]) {
                    dist[idx(next)] = nd;
                    best[idx(next)] = nc;
                    open.push({nd, next});
                }
            }
        }
    }
    return {};
}

// Minimal polyline chart, enough to eyeball the sweep trend.
void write_sweep_svg(const fs::path& path, const std::vector<sim::SweepPoint>& points) {
    double max_bits = 1.0;
    for (const auto& p : points) max_bits = std::max(max_bits, static_cast<double>(p.bits_raw));
    auto px = [&](double n) { return 60.0 + (n - points.front().n_devices) * 480.0 /
                                         std::max<double>(1.0, points.back().n_devices -
                                                                   points.front().n_devices); };
    auto py = [&](double b) { return 360.0 - b / max_bits * 320.0; };
    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"400\">\n"
        << "<rect width=\"600\" height=\"400\" fill=\"white\"/>\n"
        << "<line x1=\"60\" y1=\"360\" x2=\"560\" y2=\"360\" stroke=\"black\"/>\n"
        << "<line x1=\"60\" y1=\"40\" x2=\"60\" y2=\"360\" stroke=\"black\"/>\n";
    const char* colors[2] = {"#1f77b4", "#d62728"};
    for (int series = 0; series < 2; ++series) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[series] << "\" points=\"";
        for (const auto& p : points) {
            double bits = series == 0 ? static_cast<double>(p.bits_semcom)
                                      : static_cast<double>(p.bits_raw);
            out << px(p.n_devices) << ',' << py(bits) << ' ';
        }
        out << "\"/>\n";
    }
    out << "<text x=\"300\" y=\"390\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">devices</text>\n"
        << "<text x=\"470\" y=\"60\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#1f77b4\">latents</text>\n"
        << "<text x=\"470\" y=\"80\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#d62728\">raw images</text>\n</svg>\n";
}

}  // namespace

int main() {
    std::cout.setf(std::ios::unitbuf);  // stream lines as criteria finish
    fs::path out_dir = "acceptance_out";
    fs::create_directories(out_dir);

    ScenarioConfig config;  // the documented default scenario
    LabeledImageSet world_images = generate_digits(config.seed, 100);

    Fixture fx;

    // 1. compressed-vs-raw data volume ratio on the default scenario
    {
        auto t0 = std::chrono::steady_clock::now();
        sim::CompareResult cmp = sim::compare(config, fx.models, world_images);
        double elapsed = seconds_since(t0);
        bool complete = cmp.semcom.summary.devices_classified == 20 &&
                        cmp.raw.summary.devices_classified == 20;
        bool pass = complete && cmp.ratio_raw_over_semcom == 39.2 && elapsed < 10.0;
        report(1, "data-volume ratio", pass,
               "raw/semcom = " + fmt(cmp.ratio_raw_over_semcom, 6) + " (target 39.2), " +
                   std::to_string(cmp.semcom.summary.devices_classified) +
                   "/20 devices classified, " + fmt(elapsed, 2) + " s (limit 10 s)");

        // 2. exact per-branch bit totals for 20 devices
        bool bits_ok = cmp.semcom.summary.total_bits == 3200 &&
                       cmp.raw.summary.total_bits == 125440;
        for (const auto& r : cmp.semcom.records) bits_ok = bits_ok && r.payload_bits == 160;
        for (const auto& r : cmp.raw.records) bits_ok = bits_ok && r.payload_bits == 6272;
        report(2, "bit accounting", bits_ok,
               "semcom " + std::to_string(cmp.semcom.summary.total_bits) +
                   " bits (target 3200), raw " + std::to_string(cmp.raw.summary.total_bits) +
                   " bits (target 125440)");
    }

    // 3. A* equals Dijkstra on 200 randomized grids
    {
        auto t0 = std::chrono::steady_clock::now();
        int mismatches = 0, reachable = 0;
        for (uint64_t trial = 0; trial < 200; ++trial) {
            Rng rng(9000 + trial);
            pathplan::OccupancyGrid grid;
            grid.rows = 20;
            grid.cols = 20;
            grid.cell_size_m = 1.0;
            grid.blocked.assign(400, 0);
            for (auto& b : grid.blocked) b = rng.uniform() < 0.3 ? 1 : 0;
            auto free_cell = [&] {
                while (true) {
                    pathplan::Cell c{static_cast<int>(rng.uniform_index(20)),
                                     static_cast<int>(rng.uniform_index(20))};
                    if (!grid.is_blocked(c)) return c;
                }
            };
            pathplan::Cell start = free_cell(), goal = free_cell();
            auto got = pathplan::astar(grid, start, goal);
            OracleResult expected = dijkstra(grid, start, goal);
            if (got.has_value() != expected.reachable) {
                ++mismatches;
            } else if (got && got->cost != expected.cost) {
                ++mismatches;
            }
            if (expected.reachable) ++reachable;
        }
        double elapsed = seconds_since(t0);
        bool pass = mismatches == 0 && elapsed < 5.0;
        report(3, "pathfinding optimality", pass,
               std::to_string(200 - mismatches) + "/200 grids match Dijkstra (" +
                   std::to_string(reachable) + " reachable), " + fmt(elapsed, 2) +
                   " s (limit 5 s)");
    }

    // 4. link-budget spot values and monotonic degradation
    {
        bool pass = std::abs(channel::path_loss_db(10.0, 3.5) - 60.581360887005516) < 1e-9;
        pass = pass && channel::path_loss_db(1.0, 1.0) == 32.4;
        pass = pass && std::abs(channel::noise_dbm(config.radio) + 97.0) < 1e-9;
        pass = pass &&
               std::abs(channel::sinr_db(config.radio, 10.0) - 59.418639112994484) < 1e-9;
        Rng rng(77);
        std::vector<double> ds;
        for (int i = 0; i < 1000; ++i) ds.push_back(rng.uniform(0.1, 400.0));
        std::sort(ds.begin(), ds.end());
        double prev_sinr = std::numeric_limits<double>::infinity();
        int prev_cqi = 15;
        for (double d : ds) {
            double s = channel::sinr_db(config.radio, d);
            int cqi = channel::sinr_to_cqi(s, config.radio.cqi_thresholds_db);
            if (s > prev_sinr + 1e-12 || cqi > prev_cqi) pass = false;
            prev_sinr = s;
            prev_cqi = cqi;
        }
        report(4, "link budget", pass,
               "PL(10m,3.5GHz) = " + fmt(channel::path_loss_db(10.0, 3.5)) +
                   " dB, noise = " + fmt(channel::noise_dbm(config.radio), 1) +
                   " dBm, SINR/CQI monotone over 1000 distances");
    }

    // 5. learning quality: gradients, classifier accuracy, end-to-end accuracy
    {
        Rng grng = Rng::substream(55, 0xACCE);
        neural::MlpModel probe;
        probe.layers.push_back(neural::make_layer(5, 6, neural::Activation::ReLU, grng));
        probe.layers.push_back(neural::make_layer(3, 5, neural::Activation::Identity, grng));
        neural::Matrix px(4, 6);
        for (double& v : px.data) v = grng.uniform();
        std::vector<uint8_t> plabels = {0, 1, 2, 1};
        double gc = neural::grad_check_classifier(probe, px, plabels);

        neural::VaeModel vprobe;
        vprobe.encoder_trunk.layers.push_back(
            neural::make_layer(8, 6, neural::Activation::ReLU, grng));
        vprobe.mu_head = neural::make_layer(3, 8, neural::Activation::Identity, grng);
        vprobe.logvar_head = neural::make_layer(3, 8, neural::Activation::Identity, grng);
        vprobe.decoder.layers.push_back(neural::make_layer(8, 3, neural::Activation::ReLU, grng));
        vprobe.decoder.layers.push_back(
            neural::make_layer(6, 8, neural::Activation::Sigmoid, grng));
        neural::Matrix veps(4, 3);
        for (double& v : veps.data) v = grng.normal();
        double gv = neural::grad_check_vae(vprobe, px, veps);

        double acc = neural::classifier_accuracy(fx.models.classifier, fx.test);

        size_t correct = 0;
        for (size_t i = 0; i < fx.test.size(); ++i) {
            semcom::Payload p = semcom::make_payload(Branch::SemCom, 0, 0, fx.test.image(i),
                                                     fx.models.vae);
            std::vector<double> decoded = semcom::decode_payload(p, fx.models.vae);
            neural::Matrix x(1, kImagePixels);
            x.data.assign(decoded.begin(), decoded.end());
            neural::Matrix out = neural::forward_mlp(fx.models.classifier, x);
            if (neural::argmax_digit({out.row(0), out.cols}) == fx.test.labels[i]) ++correct;
        }
        double e2e = static_cast<double>(correct) / static_cast<double>(fx.test.size());

        double vae_drop = (fx.vae_epoch_loss.front() - fx.vae_epoch_loss.back()) /
                          fx.vae_epoch_loss.front();

        bool pass = gc <= 1e-3 && gv <= 1e-3 && acc >= 0.95 && e2e >= 0.85 && vae_drop > 0.10;
        report(5, "learning quality", pass,
               "grad err mlp " + fmt(gc, 8) + " / vae " + fmt(gv, 8) +
                   " (limit 1e-3), classifier acc " + fmt(acc, 4) +
                   " (floor 0.95), semcom e2e acc " + fmt(e2e, 4) +
                   " (floor 0.85), vae loss drop " + fmt(100 * vae_drop, 1) + "%");
    }

    // 6. determinism: identical replays and bit-identical retrained weights
    {
        sim::CompareResult a = sim::compare(config, fx.models, world_images);
        sim::CompareResult b = sim::compare(config, fx.models, world_images);
        bool same_csv = sim::metrics_csv(a.semcom) == sim::metrics_csv(b.semcom) &&
                        sim::metrics_csv(a.raw) == sim::metrics_csv(b.raw) &&
                        sim::summary_json(a.semcom) == sim::summary_json(b.semcom);

        auto train_bytes = [&] {
            neural::MlpModel m = neural::make_classifier(1);
            neural::TrainOptions opts;
            opts.epochs = 2;
            opts.lr = 0.05;
            opts.seed = 1;
            neural::train_classifier(m, fx.train, opts);
            fs::path p = out_dir / "weights_probe.semw";
            neural::save_weights(m, p.string());
            std::ifstream in(p, std::ios::binary);
            return std::string((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        };
        std::string w1 = train_bytes();
        std::string w2 = train_bytes();
        bool same_weights = !w1.empty() && w1 == w2;

        report(6, "determinism", same_csv && same_weights,
               std::string("replayed metrics ") + (same_csv ? "identical" : "DIFFER") +
                   ", retrained weight files " +
                   (same_weights ? "bit-identical (" + std::to_string(w1.size()) + " bytes)"
                                 : "DIFFER"));
    }

    // 7. device-count sweep: linear bit growth at a constant ratio, plus plots
    {
        std::vector<uint32_t> counts = {5, 10, 15, 20};
        auto points = sim::sweep_device_counts(config, fx.models, world_images, counts);
        bool pass = points.size() == 4;
        uint64_t prev_semcom = 0, prev_raw = 0;
        for (size_t i = 0; i < points.size() && pass; ++i) {
            pass = points[i].n_devices == counts[i] &&
                   points[i].bits_semcom == 160ULL * counts[i] &&
                   points[i].bits_raw == 6272ULL * counts[i] && points[i].ratio == 39.2 &&
                   points[i].bits_semcom > prev_semcom && points[i].bits_raw > prev_raw;
            prev_semcom = points[i].bits_semcom;
            prev_raw = points[i].bits_raw;
        }
        fs::path csv_path = out_dir / "sweep.csv";
        std::ofstream(csv_path) << sim::sweep_csv(points);
        fs::path svg_path = out_dir / "sweep.svg";
        write_sweep_svg(svg_path, points);
        pass = pass && fs::file_size(csv_path) > 0 && fs::file_size(svg_path) > 0;
        report(7, "device-count sweep", pass,
               "bits semcom 800..3200 / raw 31360..125440 across {5,10,15,20}, ratio 39.2, "
               "artifacts in " + out_dir.string() + "/");
    }

    // 8. planner degraded mode: no endpoint, unreachable endpoint, then a full run
    {
        unsetenv("AGENT_LLM_BASE_URL");
        unsetenv("AGENT_LLM_API_KEY");
        unsetenv("AGENT_LLM_MODEL");
        bool no_env = !agent::endpoint_from_env().has_value();

        agent::ScenarioBrief b = agent::brief(config);
        agent::LlmEndpoint dead;
        dead.base_url = "http://127.0.0.1:9/v1";
        dead.timeout_s = 2.0;
        agent::PlanOutcome outcome = agent::plan_llm(b, dead);
        bool degraded = outcome.used_fallback && !outcome.log.empty();
        bool valid_plan = true;
        try {
            agent::validate_recommendation(outcome.rec, b);
        } catch (const Error&) {
            valid_plan = false;
        }

        ScenarioConfig planned = agent::apply_commands(outcome.rec, config);
        sim::CompareResult cmp = sim::compare(planned, fx.models, world_images);
        bool ran = cmp.semcom.summary.devices_classified == 20 &&
                   cmp.raw.summary.devices_classified == 20 &&
                   cmp.ratio_raw_over_semcom == 39.2;

        report(8, "planner degraded mode", no_env && degraded && valid_plan && ran,
               "offline fallback -> " + std::to_string(outcome.rec.num_robots) +
                   " robots / " + agent::search_strategy_name(outcome.rec.search_strategy) +
                   " / " + branch_name(outcome.rec.transmission_scheme) +
                   ", replanned compare classified 20/20 at ratio " +
                   fmt(cmp.ratio_raw_over_semcom, 6));
    }

    if (g_failures == 0) {
        std::cout << "all 8 acceptance criteria passed\n";
        return 0;
    }
    std::cout << g_failures << " acceptance criteria FAILED\n";
    return 1;
}
