#include <CLI11.hpp>

#include <speckit/dsl.hpp>
#include <speckit/errors.hpp>
#include <speckit/identities.hpp>
#include <speckit/oracle.hpp>
#include <speckit/series_io.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kCap = 3 };

std::string read_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw speckit::UsageError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path);
    if (!out) {
        throw speckit::UsageError("cannot write '" + path + "'");
    }
    out << text << '\n';
}

int cmd_run(const std::string &file, const std::string &json_out)
{
    const auto script = speckit::dsl::parse(read_file(file));
    speckit::dsl::RunOptions opts;
    opts.out = &std::cout;
    const auto result = speckit::dsl::run(script, opts);
    if (!json_out.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &r : result.reports) {
            arr.push_back(speckit::to_json(r, false));
        }
        write_file(json_out, arr.dump(2));
    }
    return result.exit_code == 0 ? kPass : kFail;
}

int cmd_verify(const std::string &name, const std::string &caps_text, const std::string &json_out)
{
    std::optional<speckit::Truncation> caps;
    if (!caps_text.empty()) {
        caps = speckit::Truncation::parse(caps_text);
    }
    std::vector<speckit::VerificationReport> reports;
    if (name == "all") {
        reports = speckit::run_all_verifiers(caps);
    } else {
        const auto &names = speckit::verifier_names();
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            throw speckit::UsageError("unknown identity '" + name + "'");
        }
        reports.push_back(speckit::run_verifier(name, caps));
    }
    speckit::print_table(std::cout, reports);
    if (!json_out.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &r : reports) {
            arr.push_back(speckit::to_json(r));
        }
        write_file(json_out, arr.dump(2));
    }
    const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto &r) { return r.passed(); });
    return ok ? kPass : kFail;
}

int cmd_expand(const std::string &expr, const std::string &caps_text, const std::string &format)
{
    const auto e = speckit::dsl::parse_expression(expr);
    const bool json = format == "json";
    if (e->type == speckit::dsl::Type::Class) {
        const auto c = speckit::dsl::evaluate_class(e);
        std::cout << (json ? speckit::to_json(c).dump() : speckit::to_string(c)) << '\n';
        return kPass;
    }
    if (caps_text.empty()) {
        throw speckit::UsageError("expand needs --caps");
    }
    const auto f = speckit::dsl::evaluate(e, speckit::Truncation::parse(caps_text));
    std::cout << (json ? speckit::to_json(f).dump() : speckit::to_text(f)) << '\n';
    return kPass;
}

int cmd_enumerate(int n, bool classify, bool markers, int max_n)
{
    auto limits = speckit::OracleLimits::from_env();
    if (max_n > 0) {
        limits.max_doubletons = max_n;
    }
    if (markers) {
        const auto f = speckit::oracle_egf(n, speckit::MarkerVars{}, limits);
        std::cout << speckit::to_text(f) << '\n';
        return kPass;
    }
    std::map<std::size_t, std::uint64_t> by_pairs;
    std::uint64_t total = 0;
    speckit::for_each_matching(
        n,
        [&](const speckit::Matching &m) {
            ++total;
            ++by_pairs[m.pairs.size()];
            std::cout << (m.pairs.empty() ? "-" : speckit::format_matching(m));
            if (classify) {
                std::cout << "  " << speckit::format_profile(speckit::classify(m));
            }
            std::cout << '\n';
        },
        limits);
    std::cout << "total " << total << '\n';
    for (const auto &[k, c] : by_pairs) {
        std::cout << "pairs " << k << ": " << c << '\n';
    }
    return kPass;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"speckit: truncated series, labelled classes and operator identities"};
    app.require_subcommand(1);

    std::string file, json_out;
    auto *run = app.add_subcommand("run", "run a .spec script");
    run->add_option("file", file, "script file")->required();
    run->add_option("--json", json_out, "write check reports as JSON");

    std::string name, caps_text, verify_json;
    auto *verify = app.add_subcommand("verify", "run a built-in identity verifier");
    verify->add_option("name", name, "identity name or 'all'")->required();
    verify->add_option("--caps", caps_text, "caps, e.g. x=8,y=8,t=4");
    verify->add_option("--json", verify_json, "write reports as JSON");

    std::string expr, expand_caps, format = "text";
    auto *expand = app.add_subcommand("expand", "expand an expression");
    expand->add_option("expr", expr, "DSL expression")->required();
    expand->add_option("--caps", expand_caps, "caps, e.g. x=8,t=4");
    expand->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

    int n = 0, max_n = 0;
    bool classify = false, markers = false;
    auto *enumerate = app.add_subcommand("enumerate", "enumerate partial matchings of n doubletons");
    enumerate->add_option("--n", n, "number of doubletons")->required();
    enumerate->add_flag("--classify", classify, "print the closed/open chain profile");
    enumerate->add_flag("--markers", markers, "print the marked oracle EGF instead");
    enumerate->add_option("--max-n", max_n, "raise the enumeration cap (also SPECKIT_MAX_N)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*run) {
            return cmd_run(file, json_out);
        }
        if (*verify) {
            return cmd_verify(name, caps_text, verify_json);
        }
        if (*expand) {
            return cmd_expand(expr, expand_caps, format);
        }
        return cmd_enumerate(n, classify, markers, max_n);
    } catch (const speckit::CapExceeded &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCap;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
