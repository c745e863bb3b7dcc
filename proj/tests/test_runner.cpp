#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "qcm/config_io.hpp"
#include "qcm/runner.hpp"

using namespace qcm;
namespace fs = std::filesystem;

namespace {

const double kPi = std::numbers::pi;

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh directory per test, removed afterwards.
class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(fs::temp_directory_path() / ("qcm_test_" + name + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

const char* kMinimalSchemeA = R"(# trace distance setup
scheme = A
g_s1s2 = 0.95
g_s2aR = 0.85
theta = 0
dt = 0.08
beta_aR = 1
n_collisions = 500
)";

ConfigError config_error(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return ConfigError("none");
}

}  // namespace

TEST(ConfigParse, MinimalSchemeAGivesCaptionValues) {
    const auto c = parse_config(kMinimalSchemeA);
    EXPECT_EQ(c, SchemeConfig{});
    EXPECT_EQ(c.dt, 0.08);
    EXPECT_EQ(c.g_s2aR, 0.85);
    EXPECT_EQ(c.g_s1s2, 0.95);
}

TEST(ConfigParse, ThetaOutOfRangeNamesField) {
    std::string text = kMinimalSchemeA;
    text.replace(text.find("theta = 0"), 9, "theta = 2.0");
    const auto e = config_error(text);
    EXPECT_EQ(e.field(), "theta");
    EXPECT_EQ(e.line(), 5);
}

TEST(ConfigParse, EmptyDocumentListsRequiredFields) {
    const auto e = config_error("");
    for (const char* f : {"scheme", "g_s1s2", "g_s2aR", "theta", "dt", "beta_aR", "n_collisions"}) {
        EXPECT_NE(e.message().find(f), std::string::npos) << f;
    }
}

TEST(ConfigParse, SyntaxErrorsCarryLineAndColumn) {
    auto e = config_error("scheme = A\n  g_s1s2 0.95\n");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 3);
    e = config_error("scheme = A\ndt = fast\n");
    EXPECT_EQ(e.field(), "dt");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 6);
    e = config_error("scheme = C\n");
    EXPECT_EQ(e.field(), "scheme");
    e = config_error("scheme = A\nscheme = B\n");
    EXPECT_EQ(e.line(), 2);
    e = config_error("scheme = A\ndt = 0.08x\n");
    EXPECT_EQ(e.field(), "dt");
    e = config_error("format = qcm-config/9\n");
    EXPECT_EQ(e.field(), "format");
    e = config_error("scheme = A\nn_collisions = 2.5\n");
    EXPECT_EQ(e.field(), "n_collisions");
    e = config_error("scheme =\n");
    EXPECT_EQ(e.field(), "scheme");
}

TEST(ConfigParse, UnknownKeyIsAnError) {
    const auto e = config_error(std::string(kMinimalSchemeA) + "gamma = 1\n");
    EXPECT_EQ(e.field(), "gamma");
    EXPECT_EQ(e.line(), 9);
}

TEST(ConfigParse, SchemeFieldInconsistency) {
    auto e = config_error(std::string(kMinimalSchemeA) + "g_s1aL = 0.5\n");
    EXPECT_EQ(e.field(), "g_s1aL");
    EXPECT_NO_THROW(parse_config(std::string(kMinimalSchemeA) + "g_s1aL = 0.5\nallow_unused_left_fields = true\n"));
    std::string b = kMinimalSchemeA;
    b.replace(b.find("scheme = A"), 10, "scheme = B");
    e = config_error(b);
    EXPECT_NE(e.message().find("g_s1aL"), std::string::npos);
    EXPECT_NE(e.message().find("beta_aL"), std::string::npos);
}

TEST(ConfigParse, RoundTripIsExact) {
    SchemeConfig c;
    c.scheme = Scheme::B;
    c.g_s1aL = 0.1 + 0.2;
    c.theta = 0.95 * kPi / 2;
    c.beta_aR = 1.0 / 3.0;
    c.omega_s1 = 0.5;
    c.n_collisions = 1234;
    EXPECT_EQ(parse_config(format_config(c)), c);
    SchemeConfig a;
    a.allow_unused_left_fields = true;
    a.beta_aL = 7.0;
    EXPECT_EQ(parse_config(format_config(a)), a);
}

TEST(ConfigParse, NumberFormatting) {
    for (double v : {0.1, 1.0 / 3.0, 0.95 * kPi / 2, 1e-300, -2.5, 123456789.0}) {
        EXPECT_EQ(parse_number(format_number(v)).value(), v);
    }
    EXPECT_FALSE(parse_number("1.0 2").has_value());
    EXPECT_FALSE(parse_number("").has_value());
}

TEST(ConfigParse, LoadFromFile) {
    TempDir dir("load");
    const auto p = dir.path() / "a.cfg";
    write_file_atomic(p, kMinimalSchemeA);
    EXPECT_EQ(load_config(p.string()), SchemeConfig{});
    EXPECT_THROW(load_config((dir.path() / "missing.cfg").string()), ConfigError);
}

TEST(Presets, CatalogMatchesCaptions) {
    const std::vector<std::string> ids{"fig3", "fig4a", "fig4b", "fig5a", "fig5b",
                                       "fig6", "fig7ab", "fig8", "fig9a", "fig9b"};
    ASSERT_EQ(preset_catalog().size(), ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(preset_catalog()[i].id, ids[i]);

    const auto& fig3 = find_preset("fig3");
    ASSERT_EQ(fig3.variants.size(), 2u);
    EXPECT_EQ(fig3.variants[0].config, SchemeConfig{});
    EXPECT_EQ(fig3.variants[1].config.theta, 0.95 * kPi / 2);
    EXPECT_EQ(fig3.variants[1].config.g_s2aR, 0.85);
    EXPECT_EQ(fig3.variants[1].config.g_s1s2, 0.95);
    EXPECT_EQ(fig3.variants[1].config.dt, 0.08);

    const auto& fig4b = find_preset("fig4b");
    for (const auto& v : fig4b.variants) {
        EXPECT_EQ(v.config.scheme, Scheme::B);
        EXPECT_EQ(v.config.beta_aL, 1.0);
        EXPECT_EQ(v.config.beta_aR, 4.0);
        EXPECT_EQ(v.config.g_s1aL, 0.85);
    }
    const auto& fig9a = find_preset("fig9a");
    const auto& c9 = fig9a.variants.front().config;
    EXPECT_EQ(c9.g_s1aL, 0.5);
    EXPECT_EQ(c9.g_s2aR, 0.5);
    EXPECT_EQ(c9.dt, 0.1);
    EXPECT_EQ(fig9a.temperatures.size(), 50u);
    EXPECT_DOUBLE_EQ(fig9a.temperatures.front(), 0.2);
    EXPECT_DOUBLE_EQ(fig9a.temperatures.back(), 10.0);
    EXPECT_EQ(find_preset("fig9b").variants.front().config.omega_aL, 0.5);
    EXPECT_EQ(find_preset("fig7ab").variants.front().config.n_collisions, 1000);
    for (const auto& p : preset_catalog())
        for (const auto& v : p.variants) EXPECT_NO_THROW(v.config.validate()) << p.id << " " << v.tag;
    EXPECT_THROW(find_preset("fig10"), DomainError);
}

TEST(RunPreset, Fig3TraceDistanceStartsAtOne) {
    TempDir dir("fig3");
    RunOptions opt;
    opt.out_dir = dir.path();
    opt.n_collisions = 20;
    const auto report = run_preset("fig3", opt);
    EXPECT_EQ(report.files.size(), 4u);
    for (const char* tag : {"theta_0", "theta_nm"}) {
        const auto csv = read_file(dir.path() / ("fig3_" + std::string(tag) + "_trace_distance.csv"));
        std::istringstream lines(csv);
        std::string header, first;
        std::getline(lines, header);
        std::getline(lines, first);
        EXPECT_EQ(header, "step,T_phi_plus_phi_minus");
        EXPECT_EQ(first, "0,1");
        EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);  // header + 21 rows
    }
}

TEST(RunPreset, Fig7ConcurrenceColumnsStartAtZero) {
    TempDir dir("fig7");
    RunOptions opt;
    opt.out_dir = dir.path();
    opt.n_collisions = 10;
    run_preset("fig7ab", opt);
    const auto csv = read_file(dir.path() / "fig7ab_theta_0_concurrence.csv");
    std::istringstream lines(csv);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(header, "step,C_00,C_01,C_10,C_11");
    EXPECT_EQ(first, "0,0,0,0,0");
}

TEST(RunPreset, DeterministicAndSidecarRoundTrips) {
    TempDir a("det_a"), b("det_b");
    RunOptions opt;
    opt.n_collisions = 15;
    opt.threads = 3;
    opt.out_dir = a.path();
    const auto ra = run_preset("fig8", opt);
    opt.out_dir = b.path();
    opt.threads = 1;
    run_preset("fig8", opt);
    for (const auto& f : ra.files) {
        EXPECT_EQ(read_file(f), read_file(b.path() / f.filename())) << f;
    }
    const auto meta = read_file(a.path() / "fig8_unequal_theta_nm.meta");
    EXPECT_NE(meta.find("library_version = " + std::string(kLibraryVersion)), std::string::npos);
    SchemeConfig expected = find_preset("fig8").variants[3].config;
    expected.n_collisions = 15;
    EXPECT_EQ(config_from_metadata(meta), expected);
    EXPECT_THROW(config_from_metadata("preset = x\n"), ConfigError);
}

TEST(RunPreset, WignerAndVolumeTables) {
    TempDir dir("fig6");
    RunOptions opt;
    opt.out_dir = dir.path();
    opt.n_collisions = 2;
    opt.measure.quadrature = {16, 16};
    run_preset("fig6", opt);
    const auto csv = read_file(dir.path() / "fig6_B_unequal_theta_nm_nonclassical_volume.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,delta_ns3_prime,delta_phi_plus");
    run_preset("fig5a", opt);
    const auto w = read_file(dir.path() / "fig5a_theta_0_wigner.csv");
    EXPECT_EQ(w.substr(0, w.find('\n')), "step,W_ns3_prime,W_phi_plus");
}

TEST(RunPreset, FidelityTable) {
    TempDir dir("fig9");
    RunOptions opt;
    opt.out_dir = dir.path();
    opt.temperatures = std::vector<double>{2.0, 10.0};
    const auto report = run_preset("fig9a", opt);
    ASSERT_EQ(report.files.size(), 2u);
    const auto csv = read_file(dir.path() / "fig9a_fidelity.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header, "T_a,F_s1,F_s2,steps,converged");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    opt.temperatures = std::vector<double>{-1.0};
    EXPECT_THROW(run_preset("fig9a", opt), DomainError);
}

TEST(RunPreset, UnknownPreset) {
    EXPECT_THROW(run_preset("nope", RunOptions{}), DomainError);
}

TEST(Sweep, ThetaReproducesBothTraceDistanceCurves) {
    TempDir dir("sweep_theta");
    SchemeConfig base;
    base.n_collisions = 30;
    SweepOptions opt;
    opt.out_dir = dir.path();
    const auto r = sweep(base, "theta", {0.0, 0.95 * kPi / 2}, opt);
    ASSERT_EQ(r.entries.size(), 2u);
    TempDir pdir("sweep_theta_preset");
    RunOptions ro;
    ro.out_dir = pdir.path();
    ro.n_collisions = 30;
    run_preset("fig3", ro);
    const std::string tags[] = {"theta_0", "theta_nm"};
    for (int i = 0; i < 2; ++i) {
        ASSERT_TRUE(r.entries[i].ok);
        EXPECT_EQ(r.entries[i].table.column("T_phi_plus_phi_minus"),
                  [&] {
                      Table t;
                      std::istringstream in(read_file(pdir.path() / ("fig3_" + tags[i] + "_trace_distance.csv")));
                      std::string line;
                      std::getline(in, line);
                      std::vector<double> v;
                      while (std::getline(in, line)) v.push_back(*parse_number(line.substr(line.find(',') + 1)));
                      return v;
                  }());
        EXPECT_TRUE(fs::exists(r.entries[i].file));
    }
    const auto index = read_file(r.index);
    EXPECT_NE(index.find("0,0,sweep_theta_0.csv,ok,"), std::string::npos);
}

TEST(Sweep, EmptyValuesWritesIndexOnly) {
    TempDir dir("sweep_empty");
    SweepOptions opt;
    opt.out_dir = dir.path();
    const auto r = sweep(SchemeConfig{}, "dt", {}, opt);
    EXPECT_TRUE(r.entries.empty());
    EXPECT_EQ(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator{}), 1);
    EXPECT_EQ(read_file(r.index), "index,dt,file,status,message\n");
}

TEST(Sweep, InvalidFieldAndPerRunFailures) {
    TempDir dir("sweep_fail");
    SweepOptions opt;
    opt.out_dir = dir.path();
    EXPECT_THROW(sweep(SchemeConfig{}, "scheme", {1.0}, opt), ConfigError);
    SchemeConfig base;
    base.n_collisions = 5;
    const auto r = sweep(base, "theta", {0.1, 3.0, 0.2}, opt);
    EXPECT_TRUE(r.entries[0].ok);
    EXPECT_FALSE(r.entries[1].ok);
    EXPECT_NE(r.entries[1].message.find("theta"), std::string::npos);
    EXPECT_TRUE(r.entries[2].ok);
    const auto index = read_file(r.index);
    EXPECT_NE(index.find("1,3,,failed,"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir.path() / "sweep_theta_1.csv"));
}

TEST(Sweep, HalvedDtRoughlyDoublesDecayTime) {
    // Collisions needed for the Bell-pair trace distance to fall to 0.5.
    SchemeConfig base;
    base.n_collisions = 2000;
    SweepOptions opt;
    opt.out_dir = fs::temp_directory_path() / ("qcm_test_dt_" + std::to_string(::getpid()));
    opt.measures = {MeasureKind::trace_distance};
    const auto r = sweep(base, "dt", {0.08, 0.04}, opt);
    fs::remove_all(opt.out_dir);
    std::vector<long> reach;
    for (const auto& e : r.entries) {
        ASSERT_TRUE(e.ok) << e.message;
        const auto td = e.table.column("T_phi_plus_phi_minus");
        long n = 0;
        while (n < static_cast<long>(td.size()) && td[n] > 0.5) ++n;
        ASSERT_LT(n, static_cast<long>(td.size()));
        reach.push_back(n);
    }
    const double factor = static_cast<double>(reach[1]) / reach[0];
    EXPECT_GE(factor, 1.5);
    EXPECT_LE(factor, 2.5);
}

TEST(Output, TableCsvAndAtomicWrite) {
    Table t{{"step", "x"}, {{0, 0.1}, {1, 1.0 / 3.0}}};
    EXPECT_EQ(t.to_csv(), "step,x\n0,0.10000000000000001\n1,0.33333333333333331\n");
    Table u{{"step", "y"}, {{0, 2}, {1, 3}}};
    t.append_columns(u);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"step", "x", "y"}));
    EXPECT_EQ(t.column("y"), (std::vector<double>{2, 3}));
    EXPECT_THROW(t.column("z"), DomainError);
    TempDir dir("atomic");
    const auto p = dir.path() / "sub" / "f.csv";
    write_file_atomic(p, "abc");
    EXPECT_EQ(read_file(p), "abc");
    EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
}

TEST(Parallel, EveryIndexOnceAndErrorsPerIndex) {
    std::vector<int> hits(100, 0);
    const auto errors = parallel_for(100, 4, [&](std::size_t i) {
        ++hits[i];
        if (i == 17) throw DomainError("seventeen");
    });
    for (int h : hits) EXPECT_EQ(h, 1);
    for (std::size_t i = 0; i < errors.size(); ++i) EXPECT_EQ(static_cast<bool>(errors[i]), i == 17);
    EXPECT_THROW(rethrow_first(errors), DomainError);
}

namespace {

std::vector<std::vector<double>> parse_csv_rows(const std::string& text, std::string* header) {
    std::istringstream in(text);
    std::getline(in, *header);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            row.push_back(parse_number(std::string_view(line).substr(pos, comma - pos)).value());
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

TEST(Regression, FrozenPresetOutputs) {
    // Frozen after the oracle phase; guards against drift.
    TempDir dir("regression");
    RunOptions opt;
    opt.out_dir = dir.path();
    opt.n_collisions = 50;
    run_preset("fig3", opt);
    run_preset("fig8", opt);
    for (const char* name : {"fig3_theta_nm_trace_distance.csv", "fig8_unequal_theta_nm_concurrence.csv"}) {
        std::string h_now, h_frozen;
        const auto now = parse_csv_rows(read_file(dir.path() / name), &h_now);
        const auto frozen = parse_csv_rows(read_file(fs::path(QCM_FIXTURE_DIR) / "regression" / name), &h_frozen);
        EXPECT_EQ(h_now, h_frozen);
        ASSERT_EQ(now.size(), frozen.size()) << name;
        for (std::size_t r = 0; r < now.size(); ++r) {
            ASSERT_EQ(now[r].size(), frozen[r].size());
            for (std::size_t c = 0; c < now[r].size(); ++c) EXPECT_NEAR(now[r][c], frozen[r][c], 1e-12) << name;
        }
    }
}
