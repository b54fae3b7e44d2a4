#include "sovrisk/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "sovrisk/acgarch.hpp"
#include "sovrisk/error.hpp"
#include "sovrisk/events.hpp"
#include "sovrisk/io.hpp"
#include "sovrisk/rng.hpp"
#include "sovrisk/table.hpp"

namespace fs = std::filesystem;

namespace sovrisk {

namespace {

MonthlySeries from_values(const std::string& name, MonthIndex start,
                          const std::vector<double>& v) {
    std::vector<Cell> cells(v.begin(), v.end());
    return MonthlySeries(name, start, cells);
}

std::vector<double> ar1(Rng& rng, int n, double level, double persistence,
                        double shock_sd) {
    std::normal_distribution<double> nd(0.0, shock_sd);
    std::vector<double> out(static_cast<size_t>(n));
    double x = 0;
    for (int t = 0; t < n; ++t) {
        x = persistence * x + nd(rng);
        out[static_cast<size_t>(t)] = level + x;
    }
    return out;
}

} // namespace

void simulate_workspace(const Config& cfg, uint64_t seed, const std::string& outdir) {
    fs::create_directories(outdir);

    const std::string S = "simulate";
    MonthIndex start = MonthIndex::parse(cfg.get_or(S, "start", "1820-01"));
    const int months = cfg.get_int_or(S, "months", 1140);
    if (months < 120) throw DataError("simulate: months must be >= 120");
    MonthSpan range{start, start.plus(months - 1)};

    // ---- events ----
    Rng ev_rng = make_rng(seed, 1);
    std::vector<EventRecord> records;
    auto draw_events = [&](EventKind kind, const char* prefix, int n_events,
                           int max_duration) {
        std::uniform_int_distribution<int> month_at(61, months - 3);
        std::uniform_int_distribution<int> dur(1, max_duration);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < n_events; ++i) {
            EventRecord r;
            char id[32];
            std::snprintf(id, sizeof id, "%s%03d", prefix, i + 1);
            r.id = id;
            r.kind = kind;
            r.start = start.plus(month_at(ev_rng));
            r.duration_months = dur(ev_rng);
            if (kind == EventKind::external) {
                r.location_class = LocationClass::external_border;
                if (u(ev_rng) < 0.25) r.region_tags.insert(RegionTag::caucasus_war);
                r.distance_km = 500.0 + 2500.0 * u(ev_rng);
            } else if (u(ev_rng) < 0.5) {
                r.location_class = LocationClass::homeland;
                r.region_tags.insert(u(ev_rng) < 0.5 ? RegionTag::ukraine
                                                     : RegionTag::muscovy);
                r.distance_km = 100.0 + 1400.0 * u(ev_rng);
            } else {
                r.location_class = LocationClass::imperial;
                double p = u(ev_rng);
                r.region_tags.insert(p < 0.6 ? RegionTag::other_imperial
                                             : RegionTag::caucasus_rebellion);
                r.distance_km = 500.0 + 2500.0 * u(ev_rng);
            }
            if (u(ev_rng) < 0.1) {
                // exercise the verst fallback path
                r.versts = *r.distance_km / 1.0668;
                r.distance_km.reset();
            }
            r.oblast_size_km2 = 1000.0 * std::exp(2.0 * u(ev_rng));
            r.density_per_km2 = 1.0 + 49.0 * u(ev_rng);
            r.validate();
            records.push_back(std::move(r));
        }
    };
    draw_events(EventKind::collective, "col", cfg.get_int_or(S, "n_collective", 160), 6);
    draw_events(EventKind::attempted_assassination, "att",
                cfg.get_int_or(S, "n_attempted", 26), 1);
    draw_events(EventKind::successful_assassination, "suc",
                cfg.get_int_or(S, "n_successful", 39), 1);
    draw_events(EventKind::external, "ext", cfg.get_int_or(S, "n_external", 12), 24);
    EventCatalog catalog(std::move(records));

    // ---- monthly controls ----
    Rng c_rng = make_rng(seed, 2);
    std::vector<double> gold = ar1(c_rng, months, 5.0, 0.95, 0.10);
    std::vector<double> ruble = ar1(c_rng, months, 1.3, 0.90, 0.02);
    std::vector<double> consol = ar1(c_rng, months, 3.0, 0.98, 0.02);
    std::vector<double> drought(static_cast<size_t>(months));
    {
        std::normal_distribution<double> nd(0.0, 0.3);
        for (int t = 0; t < months; ++t)
            drought[static_cast<size_t>(t)] =
                std::sin(2.0 * std::numbers::pi * t / 48.0) + nd(c_rng);
    }
    std::vector<double> tsar(static_cast<size_t>(months), 0.0);
    {
        std::uniform_int_distribution<int> at(0, months - 1);
        for (int i = 0; i < cfg.get_int_or(S, "n_transitions", 8); ++i)
            tsar[static_cast<size_t>(at(c_rng))] = 1.0;
    }
    // months with an observed market quote: latent probit on the controls,
    // so the selection equation downstream has something real to estimate
    std::vector<double> traded(static_cast<size_t>(months));
    {
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int t = 0; t < months; ++t) {
            size_t i = static_cast<size_t>(t);
            double latent = 0.8 + 0.3 * (gold[i] - 5.0) + 0.4 * drought[i] + nd(c_rng);
            traded[i] = latent > 0 ? 1.0 : 0.0;
        }
    }

    // ---- yields from the volatility model ----
    MonthlySeries unrest_any = event_dummies(catalog, range, {}, "unrest_any");
    AcgarchSpec spec;
    spec.dependent = "yield";
    spec.include_lagged_dependent = true;
    spec.unrest_columns = {"unrest_any"};
    spec.control_columns = {"gold", "ruble_guilder", "drought", "tsar_transition"};
    spec.include_in_mean = true;
    spec.in_mean_transform = InMeanTransform::identity;
    spec.innovation = Innovation::student_t;

    AcgarchParams truth;
    truth.mu = cfg.get_double_or(S, "mu", 0.28);
    truth.phi_lag = cfg.get_double_or(S, "phi_lag", 0.97);
    truth.beta_unrest = {cfg.get_double_or(S, "beta_unrest", 0.05)};
    truth.rho_controls = {cfg.get_double_or(S, "rho_gold", -0.005),
                          cfg.get_double_or(S, "rho_ruble", -0.10),
                          cfg.get_double_or(S, "rho_drought", 0.002),
                          cfg.get_double_or(S, "rho_tsar", 0.05)};
    truth.delta_mean = cfg.get_double_or(S, "delta_mean", 0.10);
    truth.omega = cfg.get_double_or(S, "omega", 0.02);
    truth.rho_q = cfg.get_double_or(S, "rho_q", 0.97);
    truth.phi_q = cfg.get_double_or(S, "phi_q", 0.06);
    truth.alpha_s = cfg.get_double_or(S, "alpha_s", 0.10);
    truth.kappa_lev = cfg.get_double_or(S, "kappa_lev", 0.12);
    truth.beta_s = cfg.get_double_or(S, "beta_s", 0.45);
    truth.shape = cfg.get_double_or(S, "shape", 8.0);
    truth.validate(spec.innovation);

    DesignMatrix exog(range);
    exog.add(unrest_any, ColumnRole::unrest);
    exog.add(from_values("gold", start, gold), ColumnRole::control);
    exog.add(from_values("ruble_guilder", start, ruble), ColumnRole::control);
    exog.add(from_values("drought", start, drought), ColumnRole::control);
    exog.add(from_values("tsar_transition", start, tsar), ColumnRole::control);
    AcgarchSim sim = acgarch_simulate(spec, truth, months, split_seed(seed, 3), exog);
    for (double y : sim.y)
        if (y <= 0)
            throw NumericError("simulate: generated a non-positive yield; "
                               "choose a higher mu or weaker shocks");

    write_monthly_csv((fs::path(outdir) / "monthly.csv").string(),
                      {from_values("yield", start, sim.y),
                       from_values("consol", start, consol),
                       from_values("gold", start, gold),
                       from_values("ruble_guilder", start, ruble),
                       from_values("drought", start, drought),
                       from_values("tsar_transition", start, tsar),
                       from_values("traded", start, traded)});
    write_event_csv((fs::path(outdir) / "events.csv").string(), catalog);

    // ---- daily quotes around a mid-sample stretch ----
    {
        Rng d_rng = make_rng(seed, 4);
        std::normal_distribution<double> step(0.0, 0.4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<DailyQuote> quotes;
        double close = 100.0;
        int year = start.year + 40, month = 1, day = 1;
        for (int t = 0; t < cfg.get_int_or(S, "daily_days", 600); ++t) {
            close += step(d_rng);
            DailyQuote q;
            q.date = Date{year, month, day};
            double up = 0.1 + 0.5 * u(d_rng), dn = 0.1 + 0.5 * u(d_rng);
            q.high = close + up;
            q.low = close - dn;
            q.close = close;
            quotes.push_back(q);
            if (++day > 28) {
                day = 1;
                if (++month > 12) {
                    month = 1;
                    ++year;
                }
            }
        }
        write_daily_csv((fs::path(outdir) / "daily.csv").string(),
                        DailyQuoteSeries(quotes));
    }

    // ---- manifest with the generating truth ----
    std::vector<std::vector<std::string>> manifest;
    manifest.push_back({"key", "value"});
    manifest.push_back({"seed", std::to_string(seed)});
    manifest.push_back({"months", std::to_string(months)});
    manifest.push_back({"start", start.str()});
    manifest.push_back({"events", std::to_string(catalog.size())});
    auto put = [&](const std::string& k, double v) {
        manifest.push_back({"acgarch." + k, format_num(v, 17)});
    };
    put("mu", truth.mu);
    put("phi_lag", truth.phi_lag);
    put("beta:unrest_any", truth.beta_unrest[0]);
    put("rho:gold", truth.rho_controls[0]);
    put("rho:ruble_guilder", truth.rho_controls[1]);
    put("rho:drought", truth.rho_controls[2]);
    put("rho:tsar_transition", truth.rho_controls[3]);
    put("delta_mean", truth.delta_mean);
    put("omega", truth.omega);
    put("rho_q", truth.rho_q);
    put("phi_q", truth.phi_q);
    put("alpha_s", truth.alpha_s);
    put("kappa_lev", truth.kappa_lev);
    put("beta_s", truth.beta_s);
    put("shape", truth.shape);
    write_csv((fs::path(outdir) / "manifest.csv").string(), manifest);
}

} // namespace sovrisk
