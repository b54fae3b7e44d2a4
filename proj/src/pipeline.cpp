#include "sovrisk/pipeline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "sovrisk/acgarch.hpp"
#include "sovrisk/dist.hpp"
#include "sovrisk/error.hpp"
#include "sovrisk/event_study.hpp"
#include "sovrisk/events.hpp"
#include "sovrisk/features.hpp"
#include "sovrisk/io.hpp"
#include "sovrisk/returns.hpp"
#include "sovrisk/selection.hpp"

namespace fs = std::filesystem;

namespace sovrisk {

namespace {

std::string ws_path(const std::string& workspace, const char* file) {
    return (fs::path(workspace) / file).string();
}

std::map<std::string, MonthlySeries> load_features(const std::string& workspace) {
    std::string path = ws_path(workspace, "features.csv");
    if (!fs::exists(path))
        throw DataError("missing " + path + "; run the features step first");
    return parse_monthly_csv(path);
}

const MonthlySeries& column_or_throw(const std::map<std::string, MonthlySeries>& cols,
                                     const std::string& name, const std::string& who) {
    auto it = cols.find(name);
    if (it == cols.end())
        throw DataError(who + ": unknown column '" + name + "'");
    return it->second;
}

EventFilter filter_from_config(const Config& cfg, const std::string& name) {
    std::string section = "filter:" + name;
    if (!cfg.has_section(section))
        throw DataError("missing config section [" + section + "]");
    EventFilter f;
    if (cfg.has(section, "kind")) f.kind = parse_event_kind(cfg.get(section, "kind"));
    if (cfg.has(section, "location"))
        f.location = parse_location_class(cfg.get(section, "location"));
    if (cfg.has(section, "tag")) f.tag = parse_region_tag(cfg.get(section, "tag"));
    return f;
}

// Merge one fit's parameter rows into the running row order, preserving each
// fit's own canonical ordering.
void merge_row_order(std::vector<std::string>& order,
                     const std::vector<std::string>& names) {
    size_t pos = 0;
    for (const std::string& n : names) {
        auto it = std::find(order.begin(), order.end(), n);
        if (it != order.end()) {
            pos = static_cast<size_t>(it - order.begin()) + 1;
        } else {
            order.insert(order.begin() + static_cast<long>(pos), n);
            ++pos;
        }
    }
}

std::string display_param(const std::string& n) {
    if (n == "mu") return "Constant";
    if (n == "phi_lag") return "Lagged dependent";
    if (n == "delta_mean") return "GARCH-in-mean";
    if (n == "omega") return "omega (long-run level)";
    if (n == "rho_q") return "rho_q (long-run persistence)";
    if (n == "phi_q") return "phi_q (long-run sensitivity)";
    if (n == "alpha_s") return "alpha (short-run ARCH)";
    if (n == "kappa_lev") return "kappa (leverage)";
    if (n == "beta_s") return "beta (short-run GARCH)";
    if (n == "shape") return "shape";
    if (n.rfind("beta:", 0) == 0) return n.substr(5);
    if (n.rfind("rho:", 0) == 0) return n.substr(4);
    if (n.rfind("theta1:", 0) == 0) return "Long-run vol: " + n.substr(7);
    if (n.rfind("theta2:", 0) == 0) return "Short-run vol: " + n.substr(7);
    return n;
}

std::string coef_cell(double est, double se) {
    if (!(se > 0)) return format_num(est);
    double t = est / se;
    return format_coef(est, t, pvalue_normal(t));
}

} // namespace

// ---------------------------------------------------------------- ingest

IngestReport cmd_ingest(const std::string& monthly_csv, const std::string& events_csv,
                        const std::optional<std::string>& daily_csv,
                        const std::string& workspace) {
    fs::create_directories(workspace);
    IngestReport rep;

    std::map<std::string, MonthlySeries> monthly = parse_monthly_csv(monthly_csv);
    if (monthly.empty()) throw DataError("monthly file has no data columns: " + monthly_csv);
    std::vector<MonthlySeries> columns;
    for (const auto& [name, s] : monthly) columns.push_back(s);
    MonthSpan span = columns.front().span();
    rep.monthly_rows = span.length();
    for (int t = 0; t < span.length(); ++t) {
        bool any = false;
        for (const auto& s : columns)
            if (s.at_index(static_cast<size_t>(t))) { any = true; break; }
        if (!any) ++rep.monthly_gap_months;
    }

    EventCatalog catalog = parse_event_csv(events_csv);
    rep.event_count = static_cast<int>(catalog.size());
    rep.events_empty_warning = catalog.empty();
    std::set<int> active_serials;
    for (const EventRecord& r : catalog.records())
        for (int s = r.start.serial(); s <= r.last_month().serial(); ++s)
            active_serials.insert(s);
    rep.event_months = static_cast<int>(active_serials.size());

    write_monthly_csv(ws_path(workspace, "monthly.csv"), columns);
    write_event_csv(ws_path(workspace, "events.csv"), catalog);
    if (daily_csv) {
        DailyQuoteSeries daily = parse_daily_csv(*daily_csv);
        rep.daily_rows = static_cast<int>(daily.size());
        write_daily_csv(ws_path(workspace, "daily.csv"), daily);
    }

    std::ostringstream out;
    out << "Ingest report\n";
    out << "  monthly rows:        " << rep.monthly_rows << "\n";
    out << "  monthly gap months:  " << rep.monthly_gap_months << "\n";
    out << "  events:              " << rep.event_count << "\n";
    out << "  active event months: " << rep.event_months << "\n";
    out << "  daily rows:          " << rep.daily_rows << "\n";
    if (rep.events_empty_warning)
        out << "  WARNING: the event catalog is empty; event-dependent steps "
               "will produce trivial output\n";
    write_text_file(ws_path(workspace, "ingest_report.txt"), out.str());
    return rep;
}

// ---------------------------------------------------------------- features

void cmd_features(const std::string& workspace, const Config& cfg) {
    std::map<std::string, MonthlySeries> monthly =
        parse_monthly_csv(ws_path(workspace, "monthly.csv"));
    if (monthly.empty()) throw DataError("workspace monthly.csv has no data columns");
    EventCatalog catalog = parse_event_csv(ws_path(workspace, "events.csv"));
    MonthSpan span = monthly.begin()->second.span();

    std::vector<MonthlySeries> out;
    for (const auto& [name, s] : monthly) out.push_back(s);
    std::map<std::string, MonthlySeries> derived;
    auto emit = [&](const MonthlySeries& s) {
        if (monthly.count(s.name()) || derived.count(s.name()))
            throw DataError("features: duplicate output column '" + s.name() + "'");
        derived.emplace(s.name(), s);
        out.push_back(s);
    };

    const std::string S = "features";
    for (const std::string& name : cfg.get_list(S, "returns")) {
        const MonthlySeries& s = column_or_throw(monthly, name, "features");
        emit(log_return(s).renamed("ret_" + name));
    }
    if (cfg.has(S, "spread")) {
        std::string v = cfg.get(S, "spread");
        size_t colon = v.find(':');
        if (colon == std::string::npos)
            throw DataError("features: spread must be 'domestic:benchmark'");
        const MonthlySeries& dom =
            column_or_throw(monthly, v.substr(0, colon), "features");
        const MonthlySeries& bench =
            column_or_throw(monthly, v.substr(colon + 1), "features");
        emit(spread(dom, bench).renamed("spread"));
    }
    if (cfg.has(S, "liquidity_from")) {
        std::string name = cfg.get(S, "liquidity_from");
        MonthlySeries ret = log_return(column_or_throw(monthly, name, "features"));
        std::vector<Cell> cells(static_cast<size_t>(span.length()));
        for (int year = span.first.year; year <= span.last.year; ++year) {
            MonthIndex jan{year, 1}, dec{year, 12};
            if (!(span.contains(jan) && span.contains(dec))) continue;
            std::vector<Cell> months;
            for (int m = 1; m <= 12; ++m) months.push_back(ret.at(MonthIndex{year, m}));
            double liq = liquidity(months);
            for (int m = 1; m <= 12; ++m)
                cells[static_cast<size_t>(MonthIndex{year, m}.serial() -
                                          span.first.serial())] = liq;
        }
        emit(MonthlySeries("liquidity", span.first, std::move(cells)));
    }
    for (const std::string& entry : cfg.get_list(S, "bk")) {
        // col:low_period:high_period:truncation
        std::istringstream in(entry);
        std::string name, lo, hi, k;
        if (!(std::getline(in, name, ':') && std::getline(in, lo, ':') &&
              std::getline(in, hi, ':') && std::getline(in, k)))
            throw DataError("features: bk entry must be 'column:low:high:K', got '" +
                            entry + "'");
        const MonthlySeries& s = column_or_throw(monthly, name, "features");
        emit(baxter_king(s, std::stoi(lo), std::stoi(hi), std::stoi(k))
                 .renamed("bk_" + name));
    }
    for (const std::string& name : cfg.get_list(S, "dummies")) {
        EventFilter f = filter_from_config(cfg, name);
        emit(event_dummies(catalog, span, f, "dummy_" + name));
    }
    for (const std::string& name : cfg.get_list(S, "counts")) {
        std::string dummy_name = "dummy_" + name;
        auto it = derived.find(dummy_name);
        if (it == derived.end())
            throw DataError("features: counts entry '" + name +
                            "' must also appear under dummies");
        emit(cumulative_count(it->second).renamed("count_" + name));
    }
    if (cfg.get_bool_or(S, "distance", false)) {
        DistanceMode mode = cfg.get_or(S, "distance_mode", "raw") == "log"
                                ? DistanceMode::log_km
                                : DistanceMode::raw_km;
        std::vector<Cell> cells(static_cast<size_t>(span.length()));
        for (int t = 0; t < span.length(); ++t) {
            MonthIndex m = span.first.plus(t);
            double sum = 0;
            int n = 0;
            for (const EventRecord& r : catalog.records())
                if (r.active_in(m)) {
                    sum += distance_feature(r, mode);
                    ++n;
                }
            cells[static_cast<size_t>(t)] = n ? sum / n : 0.0;
        }
        emit(MonthlySeries("distance", span.first, std::move(cells)));
    }
    if (cfg.has(S, "volatility_from")) {
        std::string name = cfg.get(S, "volatility_from");
        MonthlySeries ret = log_return(column_or_throw(monthly, name, "features"));
        emit(realized_vol(ret).renamed("volatility"));
    }
    if (cfg.get_bool_or(S, "multiple_events", false))
        emit(multiple_events_dummy(catalog, span).renamed("dummy_multiple"));

    write_monthly_csv(ws_path(workspace, "features.csv"), out);
}

// ---------------------------------------------------------------- event study

Table cmd_eventstudy(const std::string& workspace, const Config& cfg) {
    std::map<std::string, MonthlySeries> features = load_features(workspace);
    EventCatalog catalog = parse_event_csv(ws_path(workspace, "events.csv"));

    const std::string S = "eventstudy";
    const MonthlySeries& returns =
        column_or_throw(features, cfg.get(S, "returns"), "eventstudy");
    EventStudySpec spec;
    spec.model = parse_baseline_model(cfg.get_or(S, "model", "raw_returns"));
    spec.pre = cfg.get_int_or(S, "pre", -1);
    spec.post = cfg.get_int_or(S, "post", 1);
    spec.estimation_window_length = cfg.get_int_or(S, "estimation_window", 60);
    spec.validate();

    std::vector<std::string> filters = cfg.get_list(S, "filters");
    if (filters.empty()) throw DataError("eventstudy: no filters configured");

    Table table;
    table.title = "Event-study abnormal returns";
    table.header = {"Events", "n", "CAAR", "Patell adj z", "GRANKT t"};
    for (const std::string& name : filters) {
        EventFilter f = filter_from_config(cfg, name);
        EventCatalog sub = catalog.filtered(f);
        if (sub.empty())
            throw DataError("eventstudy: filter '" + name + "' matches no events");
        std::vector<EventArs> ars;
        for (const EventRecord& r : sub.records()) {
            try {
                ars.push_back(abnormal_returns(returns, r.start, spec));
            } catch (const DataError&) {
                // event lacks a full estimation or event window; skip it
            }
        }
        if (ars.empty())
            throw DataError("eventstudy: filter '" + name +
                            "' has no events with a usable estimation window");
        EventStudyResult res = caar(ars, spec);
        std::string label = cfg.get_or("filter:" + name, "label", name);
        table.add_row({label, std::to_string(res.n()), format_num(res.caar),
                       res.patell ? format_num(res.patell->statistic, 3) +
                                        stars(res.patell->pvalue)
                                  : "-",
                       res.grankt ? format_num(res.grankt->statistic, 3) +
                                        stars(res.grankt->pvalue)
                                  : "-"});
    }
    write_text_file(ws_path(workspace, "eventstudy.csv"), table.to_csv());
    write_text_file(ws_path(workspace, "eventstudy.txt"), table.to_text());
    return table;
}

// ---------------------------------------------------------------- garch

namespace {

AcgarchSpec garch_spec_from_config(const Config& cfg, const std::string& section) {
    AcgarchSpec spec;
    spec.dependent = cfg.get(section, "dependent");
    spec.include_lagged_dependent = cfg.get_bool_or(section, "lagged", true);
    spec.unrest_columns = cfg.get_list(section, "unrest");
    spec.control_columns = cfg.get_list(section, "controls");
    spec.include_in_mean = cfg.get_bool_or(section, "in_mean", true);
    std::string transform = cfg.get_or(section, "transform", "identity");
    if (transform != "select")
        spec.in_mean_transform = parse_in_mean_transform(transform);
    spec.longrun_exog = cfg.get_list(section, "longrun");
    spec.shortrun_exog = cfg.get_list(section, "shortrun");
    spec.asymmetry_mode =
        parse_asymmetry_mode(cfg.get_or(section, "asymmetry", "negative_residual"));
    if (spec.asymmetry_mode == AsymmetryMode::unrest_dummy)
        spec.asymmetry_column = cfg.get(section, "asymmetry_column");
    spec.innovation = parse_innovation(cfg.get_or(section, "innovation", "student_t"));
    for (const std::string& entry : cfg.get_list(section, "fixed")) {
        size_t colon = entry.rfind(':');
        if (colon == std::string::npos)
            throw DataError("config: fixed entry must be 'param:value', got '" +
                            entry + "' in [" + section + "]");
        spec.fixed[entry.substr(0, colon)] = std::stod(entry.substr(colon + 1));
    }
    return spec;
}

DesignMatrix design_for_garch(const std::map<std::string, MonthlySeries>& features,
                              const AcgarchSpec& spec) {
    std::vector<std::pair<std::string, ColumnRole>> wanted;
    wanted.emplace_back(spec.dependent, ColumnRole::dependent);
    for (const auto& c : spec.unrest_columns) wanted.emplace_back(c, ColumnRole::unrest);
    for (const auto& c : spec.control_columns)
        wanted.emplace_back(c, ColumnRole::control);
    for (const auto& c : spec.longrun_exog)
        wanted.emplace_back(c, ColumnRole::variance_exog_longrun);
    for (const auto& c : spec.shortrun_exog)
        wanted.emplace_back(c, ColumnRole::variance_exog_shortrun);
    if (!spec.asymmetry_column.empty())
        wanted.emplace_back(spec.asymmetry_column, ColumnRole::control);

    // trim leading/trailing months that are missing in any used column (a
    // returns column loses its first slot, a band-pass column loses K on
    // each side); interior gaps still surface as errors downstream
    int first = -1, last = -1;
    std::set<std::string> seen;
    for (const auto& [name, role] : wanted) {
        const MonthlySeries& s = column_or_throw(features, name, "garch");
        if (!seen.insert(name).second) continue;
        int lo = -1, hi = -1;
        for (size_t i = 0; i < s.size(); ++i)
            if (s.at_index(i)) {
                if (lo < 0) lo = static_cast<int>(i);
                hi = static_cast<int>(i);
            }
        if (lo < 0) throw DataError("garch: column '" + name + "' is entirely missing");
        int lo_serial = s.start().serial() + lo, hi_serial = s.start().serial() + hi;
        if (first < 0 || lo_serial > first) first = lo_serial;
        if (last < 0 || hi_serial < last) last = hi_serial;
    }
    if (first > last) throw DataError("garch: used columns share no observed months");
    MonthSpan range{MonthIndex::from_serial(first), MonthIndex::from_serial(last)};

    DesignMatrix design(range);
    seen.clear();
    for (const auto& [name, role] : wanted) {
        if (!seen.insert(name).second) continue;
        design.add(features.at(name).slice(range), role);
    }
    return design;
}

} // namespace

Table cmd_garch(const std::string& workspace, const Config& cfg, uint64_t seed) {
    std::map<std::string, MonthlySeries> features = load_features(workspace);

    std::vector<std::string> names = cfg.get_list("garch", "columns");
    if (names.empty()) throw DataError("garch: no model columns configured");
    AcgarchFitOptions opts;
    opts.multistarts = cfg.get_int_or("garch", "multistarts", 3);
    opts.tol = cfg.get_double_or("garch", "tol", 1e-8);
    opts.max_iter = cfg.get_int_or("garch", "max_iter", 1000);
    opts.robust_se = cfg.get_bool_or("garch", "robust_se", false);
    opts.seed = seed;

    struct FitCol {
        std::string label;
        std::optional<AcgarchFit> fit;
        std::string failure;
    };
    std::vector<FitCol> cols;
    std::vector<std::string> row_order;
    for (const std::string& name : names) {
        std::string section = "garch:" + name;
        if (!cfg.has_section(section))
            throw DataError("missing config section [" + section + "]");
        AcgarchSpec spec = garch_spec_from_config(cfg, section);
        DesignMatrix design = design_for_garch(features, spec);
        FitCol col;
        col.label = cfg.get_or(section, "label", name);
        try {
            if (cfg.get_or(section, "transform", "identity") == "select") {
                TransformSelection sel = select_in_mean_transform(spec, design, opts);
                col.fit = sel.fits.at(sel.chosen);
            } else {
                col.fit = acgarch_fit(spec, design, opts);
            }
            merge_row_order(row_order, col.fit->param_names);
        } catch (const NumericError& e) {
            col.failure = e.what();
        }
        cols.push_back(std::move(col));
    }

    Table table;
    table.title = "Volatility-model estimates";
    table.header = {""};
    for (const FitCol& c : cols) table.header.push_back(c.label);
    auto push = [&](const std::string& label,
                    const std::function<std::string(const AcgarchFit&)>& cell) {
        std::vector<std::string> row{label};
        for (const FitCol& c : cols) row.push_back(c.fit ? cell(*c.fit) : "-");
        table.add_row(std::move(row));
    };
    for (const std::string& pname : row_order)
        push(display_param(pname), [&](const AcgarchFit& f) -> std::string {
            for (size_t i = 0; i < f.param_names.size(); ++i)
                if (f.param_names[i] == pname) {
                    if (f.spec.fixed.count(pname))
                        return format_num(f.estimates[i]) + " (fixed)";
                    return coef_cell(f.estimates[i], f.std_errors[i]);
                }
            return "-";
        });
    push("Adjusted R2", [](const AcgarchFit& f) { return format_num(f.adj_r2, 3); });
    push("AIC", [](const AcgarchFit& f) { return format_num(f.aic); });
    push("n", [](const AcgarchFit& f) { return std::to_string(f.n_obs); });
    {
        std::vector<std::string> row{"Status"};
        for (const FitCol& c : cols)
            row.push_back(c.fit ? (c.fit->convergence.converged ? "converged"
                                                                : "NOT CONVERGED")
                                : "FAILED: " + c.failure);
        table.add_row(std::move(row));
    }

    write_text_file(ws_path(workspace, "garch.csv"), table.to_csv());
    write_text_file(ws_path(workspace, "garch.txt"), table.to_text());
    return table;
}

// ---------------------------------------------------------------- selection

namespace {

// Rows where every listed column is present; `lenient` columns may be missing
// on rows where the gate column is zero (unselected outcomes).
std::vector<size_t> complete_rows(const std::map<std::string, MonthlySeries>& cols,
                                  const std::vector<std::string>& required,
                                  const std::string& gate,
                                  const std::vector<std::string>& gated) {
    size_t n = cols.begin()->second.size();
    std::vector<size_t> rows;
    for (size_t t = 0; t < n; ++t) {
        bool ok = true;
        for (const auto& name : required)
            if (!cols.at(name).at_index(t)) { ok = false; break; }
        if (ok && !gate.empty()) {
            Cell g = cols.at(gate).at_index(t);
            if (g && *g != 0.0)
                for (const auto& name : gated)
                    if (!cols.at(name).at_index(t)) { ok = false; break; }
        }
        if (ok) rows.push_back(t);
    }
    return rows;
}

Eigen::VectorXd gather(const MonthlySeries& s, const std::vector<size_t>& rows,
                       double fill = 0.0) {
    Eigen::VectorXd v(static_cast<long>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        Cell c = s.at_index(rows[i]);
        v[static_cast<long>(i)] = c ? *c : fill;
    }
    return v;
}

Eigen::MatrixXd design_with_constant(const std::map<std::string, MonthlySeries>& cols,
                                     const std::vector<std::string>& names,
                                     const std::vector<size_t>& rows) {
    Eigen::MatrixXd X(static_cast<long>(rows.size()),
                      static_cast<long>(names.size() + 1));
    X.col(0).setOnes();
    for (size_t j = 0; j < names.size(); ++j)
        X.col(static_cast<long>(j + 1)) = gather(cols.at(names[j]), rows);
    return X;
}

} // namespace

Table cmd_select(const std::string& workspace, const Config& cfg) {
    std::map<std::string, MonthlySeries> features = load_features(workspace);
    const std::string S = "select";
    if (!cfg.has_section(S)) throw DataError("missing config section [select]");

    std::string outcome = cfg.get(S, "outcome");
    std::string selection = cfg.get(S, "selection");
    std::vector<std::string> first_stage = cfg.get_list(S, "first_stage");
    std::vector<std::string> second_stage = cfg.get_list(S, "second_stage");
    if (first_stage.empty() || second_stage.empty())
        throw DataError("select: first_stage and second_stage must be non-empty");
    for (const std::string& name : second_stage)
        if (std::find(first_stage.begin(), first_stage.end(), name) ==
            first_stage.end())
            throw DataError("select: second-stage column '" + name +
                            "' is not declared in first_stage");
    std::vector<std::string> all_used = first_stage;
    all_used.push_back(selection);
    for (const std::string& name : all_used)
        column_or_throw(features, name, "select");
    column_or_throw(features, outcome, "select");

    std::vector<size_t> rows =
        complete_rows(features, all_used, selection, {outcome});
    if (rows.size() < 60) throw DataError("select: fewer than 60 usable months");

    Eigen::MatrixXd X = design_with_constant(features, first_stage, rows);
    Eigen::MatrixXd W = design_with_constant(features, second_stage, rows);
    Eigen::VectorXd s = gather(features.at(selection), rows);
    Eigen::VectorXd y = gather(features.at(outcome), rows);

    std::vector<HeckmanMethod> methods;
    for (const std::string& m : cfg.get_list(S, "methods")) {
        if (m == "two_step") methods.push_back(HeckmanMethod::two_step);
        else if (m == "ml") methods.push_back(HeckmanMethod::ml);
        else throw DataError("select: unknown method '" + m + "'");
    }
    if (methods.empty()) methods = {HeckmanMethod::two_step, HeckmanMethod::ml};

    Table table;
    table.title = "Selection-corrected outcome estimates";
    table.header = {""};
    std::vector<HeckmanFit> fits;
    for (HeckmanMethod m : methods) {
        table.header.push_back(m == HeckmanMethod::two_step ? "Two-step" : "ML");
        fits.push_back(heckman(X, s, W, y, m));
    }
    auto push = [&](const std::string& label,
                    const std::function<std::string(const HeckmanFit&)>& cell) {
        std::vector<std::string> row{label};
        for (const HeckmanFit& f : fits) row.push_back(cell(f));
        table.add_row(std::move(row));
    };
    for (size_t j = 0; j < second_stage.size(); ++j)
        push(second_stage[j], [&](const HeckmanFit& f) {
            long i = static_cast<long>(j + 1);
            return coef_cell(f.outcome_coef[i], f.outcome_se[i]);
        });
    push("Constant", [&](const HeckmanFit& f) {
        return coef_cell(f.outcome_coef[0], f.outcome_se[0]);
    });
    push("Inverse Mills ratio", [&](const HeckmanFit& f) {
        if (f.method != HeckmanMethod::two_step) return std::string("-");
        return coef_cell(f.mills_coef, f.mills_se);
    });
    push("rho", [&](const HeckmanFit& f) {
        return f.method == HeckmanMethod::ml ? coef_cell(f.rho, f.rho_se)
                                             : format_num(f.rho);
    });
    push("sigma", [&](const HeckmanFit& f) {
        return f.method == HeckmanMethod::ml ? coef_cell(f.sigma, f.sigma_se)
                                             : format_num(f.sigma);
    });
    push("Selected n", [](const HeckmanFit& f) { return std::to_string(f.n_selected); });
    push("n", [](const HeckmanFit& f) { return std::to_string(f.n_total); });
    for (const HeckmanFit& f : fits)
        if (f.no_exclusion_warning) {
            table.title += " (WARNING: no exclusion restriction; identification "
                           "rests on the Mills nonlinearity alone)";
            break;
        }

    write_text_file(ws_path(workspace, "select.csv"), table.to_csv());
    write_text_file(ws_path(workspace, "select.txt"), table.to_text());

    if (cfg.has_section("iv")) {
        std::string iv_outcome = cfg.get_or("iv", "outcome", outcome);
        std::string endog = cfg.get("iv", "endogenous");
        std::vector<std::string> exog = cfg.get_list("iv", "exogenous");
        std::vector<std::string> instruments = cfg.get_list("iv", "instruments");
        if (instruments.empty()) throw DataError("iv: no instruments configured");
        std::vector<std::string> used = exog;
        used.push_back(endog);
        used.push_back(iv_outcome);
        used.insert(used.end(), instruments.begin(), instruments.end());
        for (const std::string& name : used) column_or_throw(features, name, "iv");
        std::vector<size_t> iv_rows = complete_rows(features, used, "", {});
        if (iv_rows.size() < 60) throw DataError("iv: fewer than 60 usable months");

        Eigen::MatrixXd X_exog = design_with_constant(features, exog, iv_rows);
        Eigen::VectorXd x_endog = gather(features.at(endog), iv_rows);
        Eigen::VectorXd y_iv = gather(features.at(iv_outcome), iv_rows);
        Eigen::MatrixXd Z(static_cast<long>(iv_rows.size()),
                          static_cast<long>(instruments.size()));
        for (size_t j = 0; j < instruments.size(); ++j)
            Z.col(static_cast<long>(j)) = gather(features.at(instruments[j]), iv_rows);
        IvGmmFit g = iv_gmm(y_iv, X_exog, x_endog, Z);

        Table iv_table;
        iv_table.title = "IV-GMM estimates (" + iv_outcome + ")";
        iv_table.header = {"", "IV-GMM"};
        iv_table.add_row({"Constant", coef_cell(g.coef[0], g.se[0])});
        for (size_t j = 0; j < exog.size(); ++j)
            iv_table.add_row({exog[j], coef_cell(g.coef[static_cast<long>(j + 1)],
                                                 g.se[static_cast<long>(j + 1)])});
        long last = g.coef.size() - 1;
        iv_table.add_row({endog + " (endogenous)",
                          coef_cell(g.coef[last], g.se[last])});
        iv_table.add_row({"Hansen J (p)",
                          g.hansen_applicable
                              ? format_num(g.hansen_j, 3) + " (" +
                                    format_num(g.hansen_p, 3) + ")"
                              : "exactly identified"});
        iv_table.add_row({"KP rk LM (p)", format_num(g.kp_stat, 3) + " (" +
                                              format_num(g.kp_p, 3) + ")"});
        iv_table.add_row({"n", std::to_string(g.n)});
        write_text_file(ws_path(workspace, "iv.csv"), iv_table.to_csv());
        write_text_file(ws_path(workspace, "iv.txt"), iv_table.to_text());
    }
    return table;
}

// ---------------------------------------------------------------- report

std::string cmd_report(const std::string& workspace) {
    static const char* kParts[] = {"ingest_report.txt", "eventstudy.txt",
                                   "garch.txt", "select.txt", "iv.txt"};
    std::ostringstream out;
    bool any = false;
    for (const char* part : kParts) {
        std::string path = ws_path(workspace, part);
        if (!fs::exists(path)) continue;
        if (any) out << "\n";
        out << read_text_file(path);
        any = true;
    }
    if (!any) throw DataError("no reports found in workspace " + workspace);
    write_text_file(ws_path(workspace, "report.txt"), out.str());
    return out.str();
}

} // namespace sovrisk
