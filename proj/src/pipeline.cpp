#include "latail/pipeline.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "latail/eigensolver.hpp"
#include "latail/errors.hpp"
#include "latail/smallball.hpp"
#include "latail/specfun.hpp"

namespace latail {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key +
                                    "': " + s);
    }
}

std::string fmt(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

} // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (kv.count(key))
            throw std::invalid_argument("config: duplicate key: " + key);
        kv[key] = val;
    }

    static const char* known[] = {
        "field.b",   "q",           "site.kind",       "site.amplitude",
        "site.width", "site.x0",    "site.table",      "law.kappa",
        "law.omega_minus", "law.omega_plus", "box.a",  "box.n",
        "eta",       "E_grid",      "n_samples",       "seed",
        "nu_exponent", "c_eta",     "bound_constant"};
    for (const auto& [k, v] : kv) {
        bool ok = false;
        for (const char* name : known)
            if (k == name) ok = true;
        if (!ok) throw std::invalid_argument("config: unknown key: " + k);
    }

    auto need = [&](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end())
            throw std::invalid_argument("config: missing key: " + k);
        return it->second;
    };
    auto get_or = [&](const std::string& k, double dflt) {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : to_double(it->second, k);
    };

    ExperimentConfig cfg;
    cfg.field = FieldConfig(to_double(need("field.b"), "field.b"));
    cfg.q = static_cast<int>(to_double(need("q"), "q"));
    cfg.seed = static_cast<std::uint64_t>(to_double(need("seed"), "seed"));

    const std::string kind = need("site.kind");
    const PlanePoint x0{0.0, 0.0};
    if (kind == "gaussian") {
        cfg.site = SingleSite::make_gaussian(
            to_double(need("site.amplitude"), "site.amplitude"),
            to_double(need("site.width"), "site.width"), x0);
    } else if (kind == "indicator_plus_gaussian_tail") {
        cfg.site = SingleSite::make_indicator_tail(
            to_double(need("site.amplitude"), "site.amplitude"),
            to_double(need("site.width"), "site.width"), x0);
    } else if (kind == "tabulated_radial") {
        std::vector<std::pair<double, double>> knots;
        std::stringstream ss(need("site.table"));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("config: site.table wants r:u pairs");
            knots.emplace_back(to_double(trim(item.substr(0, colon)), "site.table"),
                               to_double(trim(item.substr(colon + 1)), "site.table"));
        }
        cfg.site = SingleSite::make_tabulated(std::move(knots), x0);
    } else {
        throw std::invalid_argument("config: unknown site.kind: " + kind);
    }

    cfg.law = CouplingLaw::make(to_double(need("law.kappa"), "law.kappa"),
                                get_or("law.omega_minus", 0.0),
                                to_double(need("law.omega_plus"), "law.omega_plus"),
                                cfg.seed);
    cfg.box = BoxConfig::make(cfg.field, to_double(need("box.a"), "box.a"),
                              static_cast<int>(to_double(need("box.n"), "box.n")));
    cfg.eta = to_double(need("eta"), "eta");
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0))
        throw std::invalid_argument("config: eta must lie in (0,1)");
    cfg.n_samples = static_cast<int>(to_double(need("n_samples"), "n_samples"));
    if (cfg.n_samples < 1)
        throw std::invalid_argument("config: n_samples must be >= 1");
    cfg.nu_exponent = to_double(need("nu_exponent"), "nu_exponent");
    if (!(cfg.nu_exponent > 0.0))
        throw std::invalid_argument("config: nu_exponent must be > 0");
    cfg.c_eta = get_or("c_eta", 10.0);
    cfg.bound_constant = get_or("bound_constant", 1.0);

    {
        std::stringstream ss(need("E_grid"));
        std::string item;
        while (std::getline(ss, item, ','))
            cfg.E_grid.push_back(to_double(trim(item), "E_grid"));
    }
    if (cfg.E_grid.empty())
        throw std::invalid_argument("config: empty E_grid");
    const double gap =
        2.0 * cfg.field.b -
        (cfg.law.omega_plus - cfg.law.omega_minus) * periodic_single_site_max(cfg.site);
    const double e_cap = std::min(gap, 1.0);
    for (size_t i = 0; i < cfg.E_grid.size(); ++i) {
        if (!(cfg.E_grid[i] > 0.0) || !(cfg.E_grid[i] < e_cap))
            throw std::invalid_argument(
                "config: E_grid values must lie in (0, min(gap, 1))");
        if (i > 0 && !(cfg.E_grid[i] < cfg.E_grid[i - 1]))
            throw std::invalid_argument("config: E_grid must be strictly decreasing");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    return parse(in);
}

int ExperimentConfig::truncation_K() const {
    return default_truncation_K(field, box);
}

std::string ExperimentConfig::manifest_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["kappa"] = law.kappa;
    j["omega_plus"] = law.omega_plus;
    j["a"] = box.a;
    j["n"] = box.n;
    j["b"] = field.b;
    j["q"] = q;
    j["K"] = truncation_K();
    return j.dump(2) + "\n";
}

namespace {

struct TaskResult {
    double c_half = 0.0, c_mid = 0.0, c_twice = 0.0;
    bool ok = false;
};

struct RowPlan {
    double E;
    BoxConfig box;
    int K;
    bool capped;
};

RowPlan plan_row(const ExperimentConfig& cfg, double E) {
    RowPlan plan;
    plan.E = E;
    const double l_target = std::pow(E, -cfg.nu_exponent);
    plan.capped = l_target >= cfg.box.L;
    int n_used = cfg.box.n;
    if (!plan.capped) {
        n_used = std::max(
            0, static_cast<int>(std::ceil((2.0 * l_target / cfg.box.a - 1.0) / 2.0)));
        n_used = std::min(n_used, cfg.box.n);
    }
    plan.box = BoxConfig::make(cfg.field, cfg.box.a, n_used);
    plan.K = default_truncation_K(cfg.field, plan.box);
    return plan;
}

std::uint64_t task_stream(int e_index, int sample_index) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e_index)) << 32) |
           static_cast<std::uint32_t>(sample_index);
}

} // namespace

AlloySample pipeline_sample(const ExperimentConfig& cfg, int e_index,
                            int sample_index) {
    if (e_index < 0 || e_index >= static_cast<int>(cfg.E_grid.size()))
        throw std::invalid_argument("pipeline_sample: E index out of range");
    const RowPlan plan = plan_row(cfg, cfg.E_grid[e_index]);
    return AlloySample::draw(plan.box, cfg.law, task_stream(e_index, sample_index));
}

IdsResult ids_estimate(const ExperimentConfig& cfg, int workers) {
    const int n_rows = static_cast<int>(cfg.E_grid.size());
    const int n_tasks = n_rows * cfg.n_samples;

    std::vector<RowPlan> plans;
    plans.reserve(n_rows);
    for (double E : cfg.E_grid) plans.push_back(plan_row(cfg, E));

    std::vector<TaskResult> results(n_tasks);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= n_tasks) return;
            const int e_idx = t / cfg.n_samples;
            const int s_idx = t % cfg.n_samples;
            const RowPlan& plan = plans[e_idx];
            TaskResult& out = results[t];
            try {
                const AlloySample sample =
                    AlloySample::draw(plan.box, cfg.law, task_stream(e_idx, s_idx));
                const AssembledOperator op = assemble_projected(
                    cfg.field, cfg.q, sample, cfg.site, {{0.0, 0.0}, plan.K});
                const std::vector<double> evs =
                    hermitian_eigenvalues(op.matrix, op.K);
                out.c_half = counting_proxy(evs, 0.5 * plan.E, plan.box);
                out.c_mid = counting_proxy(evs, plan.E, plan.box);
                out.c_twice = counting_proxy(evs, 2.0 * plan.E, plan.box);
                out.ok = true;
            } catch (const std::exception&) {
                out.ok = false;
            }
        }
    };

    int n_workers = workers > 0
                        ? workers
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min(n_workers, n_tasks));
    {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    IdsResult res;
    std::ostringstream csv;
    csv << "E,L_used,capped,n_samples,dropped,N_half,N_hat,N_twice,"
           "stderr_half,stderr,stderr_twice\n";
    for (int e_idx = 0; e_idx < n_rows; ++e_idx) {
        IdsRow row;
        row.at_E.E = plans[e_idx].E;
        row.at_E.L_used = plans[e_idx].box.L;
        row.capped = plans[e_idx].capped;
        row.n_box_used = plans[e_idx].box.n;

        // fixed sample-index aggregation order
        std::vector<const TaskResult*> ok;
        for (int s = 0; s < cfg.n_samples; ++s) {
            const TaskResult& tr = results[e_idx * cfg.n_samples + s];
            if (tr.ok)
                ok.push_back(&tr);
            else
                ++row.dropped;
        }
        row.failed = 4 * row.dropped > cfg.n_samples;
        const int n = static_cast<int>(ok.size());
        row.at_E.n_samples = n;
        auto mean_stderr = [&](auto pick, double& mean, double& se) {
            neumaier_sum s1;
            for (const TaskResult* tr : ok) s1.add(pick(*tr));
            mean = n > 0 ? s1.result() / n : 0.0;
            neumaier_sum s2;
            for (const TaskResult* tr : ok) {
                const double d = pick(*tr) - mean;
                s2.add(d * d);
            }
            se = n > 1 ? std::sqrt(s2.result() / (static_cast<double>(n) * (n - 1)))
                       : 0.0;
        };
        mean_stderr([](const TaskResult& t) { return t.c_mid; }, row.at_E.N_hat,
                    row.at_E.stderr_);
        mean_stderr([](const TaskResult& t) { return t.c_half; }, row.N_half,
                    row.stderr_half);
        mean_stderr([](const TaskResult& t) { return t.c_twice; }, row.N_twice,
                    row.stderr_twice);

        csv << fmt(row.at_E.E) << ',' << fmt(row.at_E.L_used) << ','
            << (row.capped ? 1 : 0) << ',' << row.at_E.n_samples << ','
            << row.dropped << ',' << fmt(row.N_half) << ',' << fmt(row.at_E.N_hat)
            << ',' << fmt(row.N_twice) << ',' << fmt(row.stderr_half) << ','
            << fmt(row.at_E.stderr_) << ',' << fmt(row.stderr_twice) << '\n';
        res.rows.push_back(std::move(row));
    }
    res.csv = csv.str();
    res.manifest = cfg.manifest_json();
    return res;
}

Certificate certify_thr2(const ExperimentConfig& cfg, const AlloySample& sample,
                         double E, int sample_index) {
    if (!(E > 0.0) || E >= 1.0)
        throw std::invalid_argument("certify_thr2: E must lie in (0,1)");
    const double alog = -std::log(E);
    const double pw = std::pow(alog, 1.0 - cfg.eta);
    const long R = std::lround(std::pow(alog, 0.5 * (1.0 - cfg.eta)));
    const double log_scale = pw * std::log(alog);
    const double correction = std::exp(-pw / cfg.c_eta);

    const int K = default_truncation_K(cfg.field, sample.box);
    const AssembledOperator op =
        assemble_projected(cfg.field, cfg.q, sample, cfg.site, {{0.0, 0.0}, K});
    const std::vector<double> evs = hermitian_eigenvalues(op.matrix, op.K);
    const double lambda_min = evs.front();
    const double norm = std::max(std::fabs(evs.front()), std::fabs(evs.back()));

    // periodic window sums over the coupling grid
    const long g = static_cast<long>(std::floor(sample.box.L - 1e-12));
    const long side = 2 * g + 1;
    auto omega_at = [&](long x, long y) {
        const long ix = ((x + g) % side + side) % side;
        const long iy = ((y + g) % side + side) % side;
        return sample.couplings[static_cast<size_t>(iy) * side + ix].omega;
    };
    std::vector<std::pair<long, long>> ball;
    for (long dx = -R; dx <= R; ++dx)
        for (long dy = -R; dy <= R; ++dy)
            if (dx * dx + dy * dy <= R * R) ball.emplace_back(dx, dy);

    double inf_sum = std::numeric_limits<double>::infinity();
    long arg_x = 0, arg_y = 0;
    for (long gy = -g; gy <= g; ++gy)
        for (long gx = -g; gx <= g; ++gx) {
            double s = 0.0;
            for (const auto& [dx, dy] : ball) s += omega_at(gx + dx, gy + dy);
            if (s < inf_sum) {
                inf_sum = s;
                arg_x = gx;
                arg_y = gy;
            }
        }

    const double lhs = std::exp(log_scale) * lambda_min;
    const double rhs = inf_sum - correction;
    const double tol = 1e-6 * norm;

    Certificate cert;
    cert.lemma_id = "thr2";
    cert.params["E"] = E;
    cert.params["eta"] = cfg.eta;
    cert.params["c_eta"] = cfg.c_eta;
    cert.params["R"] = static_cast<double>(R);
    cert.params["K"] = K;
    cert.params["L"] = sample.box.L;
    cert.params["b"] = cfg.field.b;
    cert.params["q"] = cfg.q;
    cert.params["sample_index"] = sample_index;
    cert.constants["lambda_min"] = lambda_min;
    cert.constants["inf_window_sum"] = inf_sum;
    cert.constants["correction"] = correction;
    cert.constants["log_scale"] = log_scale;
    cert.constants["lhs"] = lhs;
    cert.constants["rhs"] = rhs;
    cert.constants["margin"] = lhs - rhs;
    cert.constants["tolerance"] = tol;
    cert.constants["matrix_norm"] = norm;
    cert.rows.push_back({{"gx", static_cast<double>(arg_x)},
                         {"gy", static_cast<double>(arg_y)},
                         {"window_sum", inf_sum}});
    cert.precision_note =
        "pass requires e^{log_scale} lambda_min >= inf - correction - "
        "1e-6 * matrix norm";
    cert.pass = lhs >= rhs - tol;
    return cert;
}

Certificate certify_thr2(const ExperimentConfig& cfg, int sample_index, double E) {
    // samples keyed to the last (smallest-E) grid row by convention
    const int e_idx = static_cast<int>(cfg.E_grid.size()) - 1;
    const AlloySample sample = pipeline_sample(cfg, e_idx, sample_index);
    return certify_thr2(cfg, sample, E, sample_index);
}

std::vector<BoundRow> upper_bound_chain(const ExperimentConfig& cfg,
                                        const std::vector<IdsRow>& ids_rows) {
    std::vector<BoundRow> rows;
    for (const auto& ir : ids_rows) {
        BoundRow row;
        row.E = ir.at_E.E;
        row.mc_N = ir.at_E.N_hat;
        row.mc_stderr = ir.at_E.stderr_;
        const double alog = -std::log(row.E);
        const double radius = std::pow(alog, 0.5 * (1.0 - cfg.eta));
        row.n_sites = lattice_count(radius);
        const double t = 2.0 * std::exp(-std::pow(alog, 1.0 - cfg.eta) / cfg.c_eta);
        row.log_tail = -std::pow(row.E, -cfg.eta);

        double p;
        if (t >= row.n_sites * cfg.law.omega_plus) {
            p = 1.0;
            row.log_p = 0.0;
        } else if (row.n_sites <= 64) {
            const SmallBallResult sb =
                small_ball_bracket(cfg.law, static_cast<int>(row.n_sites), t);
            if (sb.converged) {
                p = sb.bracket.upper; // keep the bound one-sided
                row.log_p = std::log(p);
                row.p_exact_used = true;
            } else {
                row.log_p = log_small_ball_asymptotic(
                    cfg.law, static_cast<int>(row.n_sites), t);
                p = std::exp(row.log_p);
            }
        } else {
            row.log_p =
                log_small_ball_asymptotic(cfg.law, static_cast<int>(row.n_sites), t);
            p = std::exp(row.log_p);
        }

        const double area = (2.0 * ir.at_E.L_used) * (2.0 * ir.at_E.L_used);
        row.bound = cfg.bound_constant * area * p + std::exp(row.log_tail);
        row.vacuous = row.bound > 1.0;
        row.exceeds = !row.vacuous && row.mc_N > row.bound + 3.0 * row.mc_stderr;
        rows.push_back(row);
    }
    return rows;
}

std::string bound_table_csv(const std::vector<BoundRow>& rows) {
    std::ostringstream out;
    out << "E,bound,p,p_exact_used,log_tail,n_sites,vacuous,mc_N,mc_stderr,"
           "exceeds\n";
    for (const auto& r : rows) {
        out << fmt(r.E) << ',' << fmt(r.bound) << ',' << format_from_log(r.log_p)
            << ',' << (r.p_exact_used ? 1 : 0) << ',' << fmt(r.log_tail) << ','
            << r.n_sites << ',' << (r.vacuous ? 1 : 0) << ',' << fmt(r.mc_N)
            << ',' << fmt(r.mc_stderr) << ',' << (r.exceeds ? 1 : 0) << '\n';
    }
    return out.str();
}

LifshitzFit fit_lifshitz_exponent(const std::vector<IdsEstimate>& estimates) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : estimates) {
        if (!(e.N_hat > 0.0) || !(e.N_hat < 1.0)) continue;
        const double x = std::log(std::fabs(std::log(e.E)));
        const double y = std::log(std::fabs(std::log(e.N_hat)));
        pts.emplace_back(x, y);
    }
    if (pts.size() < 4)
        throw std::invalid_argument(
            "fit_lifshitz_exponent: needs at least 4 usable estimates (N in (0,1))");

    const double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    LifshitzFit fit;
    fit.points_used = static_cast<int>(pts.size());
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0.0;
    for (auto [x, y] : pts) {
        const double r = y - (fit.slope * x + fit.intercept);
        ss += r * r;
        fit.point_ratios.push_back(y / x);
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

std::string LifshitzFit::to_json() const {
    nlohmann::json j;
    j["slope"] = slope;
    j["intercept"] = intercept;
    j["rms_residual"] = rms_residual;
    j["points_used"] = points_used;
    j["point_ratios"] = point_ratios;
    return j.dump(2) + "\n";
}

std::vector<IdsEstimate> read_estimates_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw std::invalid_argument("estimates csv: empty input");
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(trim(c));
    }
    auto col = [&](const std::string& name) {
        for (size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return static_cast<int>(i);
        throw std::invalid_argument("estimates csv: missing column " + name);
    };
    const int ci_E = col("E"), ci_N = col("N_hat"), ci_se = col("stderr");
    const int ci_n = col("n_samples"), ci_L = col("L_used");

    std::vector<IdsEstimate> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) f.push_back(c);
        if (f.size() < cols.size())
            throw std::invalid_argument("estimates csv: short row: " + line);
        IdsEstimate e;
        e.E = to_double(f[ci_E], "E");
        e.N_hat = to_double(f[ci_N], "N_hat");
        e.stderr_ = to_double(f[ci_se], "stderr");
        e.n_samples = static_cast<int>(to_double(f[ci_n], "n_samples"));
        e.L_used = to_double(f[ci_L], "L_used");
        out.push_back(e);
    }
    return out;
}

} // namespace latail
