// gifdec command line tool: optimize single GIFs, sweep thresholds into
// CSV, batch directories, compare files, inspect structure, and generate
// synthetic test corpora.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gifdec/gifdec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const fs::path& path, std::span<const uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path.string());
}

// Deterministic formatting; infinities print as the literal "inf".
std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json json_num(double v) {
    if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
    return json(v);
}

json quality_json(const gifdec::QualityReport& q) {
    json per = json::array();
    for (double m : q.per_frame_mse) per.push_back(m);
    return json{{"mse_avg", q.mse_avg},
                {"mse_max", q.mse_max},
                {"psnr_avg", json_num(q.psnr_avg)},
                {"psnr_max_err", json_num(q.psnr_max_err)},
                {"per_frame_mse", per}};
}

json report_json(const gifdec::OptimizationReport& r) {
    return json{{"threshold", r.threshold},
                {"lcts_before", r.lcts_before},
                {"lcts_removed", r.lcts_removed},
                {"bytes_before", r.bytes_before},
                {"bytes_after", r.bytes_after},
                {"bpp_before", r.bpp_before},
                {"bpp_after", r.bpp_after},
                {"saving_bpp", r.saving_bpp},
                {"quality", quality_json(r.quality)}};
}

int resolve_jobs(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("GIFDEC_JOBS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

// Run fn(0..n-1) on up to `jobs` threads. fn must not throw.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
    size_t workers = std::min(size_t(jobs), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

// "a:b:n" linspace or a comma list; must come back ascending in [0,1].
std::vector<double> parse_thresholds(const std::string& text) {
    std::vector<double> out;
    auto parse_one = [](const std::string& s) {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad threshold '" + s + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::istringstream ss(text);
        std::string a, b, n;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, n))
            throw std::invalid_argument("expected a:b:n");
        double lo = parse_one(a), hi = parse_one(b);
        long count = std::stol(n);
        if (count < 1) throw std::invalid_argument("linspace needs n >= 1");
        if (count == 1) {
            out.push_back(lo);
        } else {
            for (long i = 0; i < count; ++i)
                out.push_back(lo + (hi - lo) * double(i) / double(count - 1));
        }
    } else {
        std::istringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_one(item));
        if (out.empty()) throw std::invalid_argument("empty threshold list");
    }
    for (size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] >= 0.0 && out[i] <= 1.0))
            throw std::invalid_argument("thresholds must lie in [0,1]");
        if (i > 0 && out[i] < out[i - 1])
            throw std::invalid_argument("thresholds must be ascending");
    }
    return out;
}

std::vector<fs::path> gif_files_under(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (char& c : ext) c = char(std::tolower(uint8_t(c)));
        if (ext == ".gif") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

constexpr const char* kCsvHeader =
    "file,threshold,bytes_orig,bytes_opt,bpp_orig,bpp_opt,saving_bpp,"
    "lcts_total,lcts_removed,mse_avg,mse_max,psnr_avg,psnr_max_err";

std::string csv_row(const std::string& file, double t, const gifdec::OptimizationReport& r) {
    std::ostringstream row;
    row << file << ',' << num(t) << ',' << r.bytes_before << ',' << r.bytes_after << ','
        << num(r.bpp_before) << ',' << num(r.bpp_after) << ',' << num(r.saving_bpp) << ','
        << r.lcts_before << ',' << r.lcts_removed << ',' << num(r.quality.mse_avg) << ','
        << num(r.quality.mse_max) << ',' << num(r.quality.psnr_avg) << ','
        << num(r.quality.psnr_max_err);
    return row.str();
}

int cmd_optimize(const std::string& input, const std::string& output, double threshold,
                 const std::string& json_path) {
    std::vector<uint8_t> bytes;
    gifdec::DecimationResult result;
    try {
        bytes = read_file(input);
        gifdec::GifFile gif = gifdec::decode(bytes);
        result = gifdec::decimate(gif, threshold, bytes.size());
        write_file(output, result.encoded);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const auto& r = result.report;
    std::cout << input << ": " << r.bytes_before << " -> " << r.bytes_after
              << " bytes, saving " << num(r.saving_bpp) << " bpp, LCTs removed "
              << r.lcts_removed << "/" << r.lcts_before << ", PSNR_avg "
              << num(r.quality.psnr_avg) << " dB, PSNR_max_err "
              << num(r.quality.psnr_max_err) << " dB";
    if (r.lcts_removed == 0) std::cout << " (no-op: nothing removable at t=" << num(threshold) << ")";
    std::cout << "\n";
    if (!json_path.empty()) {
        json doc = report_json(r);
        doc["input"] = input;
        doc["output"] = output;
        json actions = json::array();
        for (const auto& f : result.outcome.frames)
            actions.push_back(json{{"frame", f.frame},
                                   {"action", gifdec::to_string(f.action)},
                                   {"dissimilarity", f.dissimilarity}});
        doc["frames"] = actions;
        std::ofstream out(json_path);
        out << doc.dump(2) << "\n";
        if (!out) {
            std::cerr << "error: cannot write " << json_path << "\n";
            return 1;
        }
    }
    return 0;
}

int cmd_sweep(std::vector<std::string> inputs, const std::string& thresholds_text,
              const std::string& csv_path, int jobs) {
    std::vector<double> grid;
    try {
        grid = thresholds_text.empty() ? gifdec::default_threshold_grid()
                                       : parse_thresholds(thresholds_text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::sort(inputs.begin(), inputs.end());

    struct FileRows {
        std::vector<std::string> rows;
        std::string error;
    };
    std::vector<FileRows> results(inputs.size());
    parallel_for(inputs.size(), resolve_jobs(jobs), [&](size_t i) {
        try {
            std::vector<uint8_t> bytes = read_file(inputs[i]);
            gifdec::GifFile gif = gifdec::decode(bytes);
            auto rows = gifdec::sweep(gif, grid, bytes.size());
            for (const auto& [t, report] : rows)
                results[i].rows.push_back(csv_row(inputs[i], t, report));
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    std::ostringstream csv;
    csv << kCsvHeader << "\n";
    size_t ok = 0;
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (!results[i].error.empty()) {
            std::cerr << "skip " << inputs[i] << ": " << results[i].error << "\n";
            continue;
        }
        ++ok;
        for (const std::string& row : results[i].rows) csv << row << "\n";
    }
    if (ok == 0) {
        std::cerr << "error: no file could be processed\n";
        return 1;
    }
    if (csv_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(csv_path);
        out << csv.str();
        if (!out) {
            std::cerr << "error: cannot write " << csv_path << "\n";
            return 1;
        }
    }
    return 0;
}

int cmd_batch(const std::string& input_dir, const std::string& output_dir, double threshold,
              int jobs) {
    std::vector<fs::path> files;
    try {
        files = gif_files_under(input_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (files.empty()) {
        std::cerr << "error: no files under " << input_dir << "\n";
        return 1;
    }

    struct Outcome {
        bool ok = false;
        std::string error;
        size_t bytes_before = 0;
        size_t bytes_after = 0;
        double saving_bpp = 0.0;
    };
    std::vector<Outcome> outcomes(files.size());
    const fs::path in_root(input_dir);
    const fs::path out_root(output_dir);

    // Mirror the directory layout up front; creation is not thread-safe per
    // branch otherwise.
    try {
        for (const fs::path& f : files)
            fs::create_directories(out_root / fs::relative(f, in_root).parent_path());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    parallel_for(files.size(), resolve_jobs(jobs), [&](size_t i) {
        Outcome& o = outcomes[i];
        try {
            std::vector<uint8_t> bytes = read_file(files[i]);
            gifdec::GifFile gif = gifdec::decode(bytes);
            gifdec::DecimationResult result = gifdec::decimate(gif, threshold, bytes.size());
            write_file(out_root / fs::relative(files[i], in_root), result.encoded);
            o.ok = true;
            o.bytes_before = result.report.bytes_before;
            o.bytes_after = result.report.bytes_after;
            o.saving_bpp = result.report.saving_bpp;
        } catch (const std::exception& e) {
            o.error = e.what();
        }
    });

    size_t ok = 0;
    long long saved = 0;
    double saving_bpp_sum = 0.0;
    for (size_t i = 0; i < files.size(); ++i) {
        if (!outcomes[i].ok) {
            std::cerr << "fail " << files[i].string() << ": " << outcomes[i].error << "\n";
            continue;
        }
        ++ok;
        saved += (long long)outcomes[i].bytes_before - (long long)outcomes[i].bytes_after;
        saving_bpp_sum += outcomes[i].saving_bpp;
    }
    if (ok == 0) {
        std::cerr << "error: every file failed\n";
        return 1;
    }
    std::cout << ok << "/" << files.size() << " files optimized, total bytes saved " << saved
              << ", mean saving " << num(saving_bpp_sum / double(ok)) << " bpp\n";
    return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b) {
    try {
        std::vector<uint8_t> bytes_a = read_file(path_a);
        std::vector<uint8_t> bytes_b = read_file(path_b);
        gifdec::GifFile a = gifdec::decode(bytes_a);
        gifdec::GifFile b = gifdec::decode(bytes_b);
        gifdec::QualityReport quality = gifdec::sequence_mse(a, b);
        gifdec::RateReport rate_a = gifdec::bitrate(bytes_a.size(), a);
        gifdec::RateReport rate_b = gifdec::bitrate(bytes_b.size(), b);
        rate_b.saving_bpp = rate_a.bpp - rate_b.bpp;
        json doc{{"a", path_a},
                 {"b", path_b},
                 {"quality", quality_json(quality)},
                 {"rate_a",
                  {{"bytes", rate_a.bytes}, {"bpp", rate_a.bpp}, {"saving_bpp", rate_a.saving_bpp}}},
                 {"rate_b",
                  {{"bytes", rate_b.bytes}, {"bpp", rate_b.bpp}, {"saving_bpp", rate_b.saving_bpp}}}};
        std::cout << doc.dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_inspect(const std::string& path) {
    try {
        std::vector<uint8_t> bytes = read_file(path);
        gifdec::GifFile gif = gifdec::decode(bytes);
        int lct_count = 0;
        for (const auto& f : gif.frames)
            if (f.lct) ++lct_count;
        std::cout << "file: " << path << "\n"
                  << "version: " << (gif.version == gifdec::Version::gif87a ? "GIF87a" : "GIF89a")
                  << "\n"
                  << "logical screen: " << gif.screen.width << "x" << gif.screen.height << "\n"
                  << "global color table: "
                  << (gif.gct ? std::to_string(gif.gct->size()) + " entries" : "none") << "\n";
        if (gif.loop_count)
            std::cout << "loop: " << (*gif.loop_count == 0 ? "infinite"
                                                           : std::to_string(*gif.loop_count))
                      << "\n";
        std::cout << "#frames: " << gif.frames.size() << "\n"
                  << "#LCTs: " << lct_count << "\n";
        for (size_t i = 0; i < gif.frames.size(); ++i) {
            const auto& f = gif.frames[i];
            std::cout << "frame " << i << ": " << f.width << "x" << f.height << "+" << f.left
                      << "+" << f.top;
            if (f.interlaced) std::cout << " interlaced";
            if (f.gce && f.gce->transparency)
                std::cout << " transparent=" << int(f.gce->transparent_index);
            if (f.lct) {
                std::cout << ", local table " << f.lct->size() << " entries";
                if (gif.gct) {
                    auto d = gifdec::table_dissimilarity(*f.lct, *gif.gct,
                                                         gifdec::transparent_slot(f));
                    std::cout << ", D=" << num(d.dissimilarity);
                } else {
                    std::cout << ", D=n/a";
                }
            } else {
                std::cout << ", global table";
            }
            std::cout << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_gen_corpus(const std::string& output_dir, uint32_t seed, int count,
                   const std::string& profile) {
    gifdec::synth::SynthOptions opt;
    if (profile == "lossless")
        opt.profile = gifdec::synth::SynthProfile::lossless;
    else if (profile == "near")
        opt.profile = gifdec::synth::SynthProfile::near;
    try {
        fs::create_directories(output_dir);
        std::vector<gifdec::GifFile> corpus = gifdec::synth::make_corpus(seed, count, opt);
        for (int i = 0; i < count; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "corpus_%04d.gif", i);
            write_file(fs::path(output_dir) / name, gifdec::encode(corpus[size_t(i)]));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << count << " files to " << output_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GIF local-color-table decimation tool"};
    app.require_subcommand(1);

    std::string input, output, json_path, csv_path, thresholds_text, profile = "mixed";
    std::vector<std::string> inputs;
    double threshold = 0.0;
    int jobs = 0;
    uint32_t seed = 1;
    int count = 100;

    CLI::App* optimize = app.add_subcommand("optimize", "Optimize one GIF at a threshold");
    optimize->add_option("input", input, "input GIF")->required()->check(CLI::ExistingFile);
    optimize->add_option("-o,--output", output, "output GIF path")->required();
    optimize->add_option("-t,--threshold", threshold, "dissimilarity threshold")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    optimize->add_option("--json", json_path, "write the full report as JSON here");

    CLI::App* sweep = app.add_subcommand("sweep", "Emit a CSV over a threshold grid");
    sweep->add_option("inputs", inputs, "input GIFs")->required()->check(CLI::ExistingFile);
    sweep->add_option("--thresholds", thresholds_text,
                      "comma list or a:b:n linspace (default: 25 points over [0,0.25])");
    sweep->add_option("--csv", csv_path, "CSV output path (default: stdout)");
    sweep->add_option("-j,--jobs", jobs, "parallel files (default: $GIFDEC_JOBS or cores)");

    CLI::App* batch = app.add_subcommand("batch", "Optimize every .gif under a directory");
    batch->add_option("input", input, "input directory")->required()->check(CLI::ExistingDirectory);
    batch->add_option("-o,--output", output, "output directory (mirrors the input tree)")
        ->required();
    batch->add_option("-t,--threshold", threshold, "dissimilarity threshold")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    batch->add_option("-j,--jobs", jobs, "parallel files (default: $GIFDEC_JOBS or cores)");

    CLI::App* compare = app.add_subcommand("compare", "Quality/rate comparison of two GIFs");
    compare->add_option("a", input, "reference GIF")->required()->check(CLI::ExistingFile);
    compare->add_option("b", output, "candidate GIF")->required()->check(CLI::ExistingFile);

    CLI::App* inspect = app.add_subcommand("inspect", "Print GIF structure and per-frame D");
    inspect->add_option("input", input, "input GIF")->required()->check(CLI::ExistingFile);

    CLI::App* gen = app.add_subcommand("gen-corpus", "Generate synthetic animated GIFs");
    gen->add_option("-o,--output", output, "output directory")->required();
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--count", count, "number of files")->check(CLI::PositiveNumber);
    gen->add_option("--profile", profile, "mixed|lossless|near")
        ->check(CLI::IsMember({"mixed", "lossless", "near"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (optimize->parsed()) return cmd_optimize(input, output, threshold, json_path);
    if (sweep->parsed()) return cmd_sweep(inputs, thresholds_text, csv_path, jobs);
    if (batch->parsed()) return cmd_batch(input, output, threshold, jobs);
    if (compare->parsed()) return cmd_compare(input, output);
    if (inspect->parsed()) return cmd_inspect(input);
    if (gen->parsed()) return cmd_gen_corpus(output, seed, count, profile);
    return 2;
}
