// Batch front-end: phantom generation, degradation simulation, prior
// training, reconstruction, evaluation. Exit codes: 0 success, 2 usage or
// config error, 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "force/force.hpp"

namespace fs = std::filesystem;
using namespace force;

namespace {

// Flat key=value config support: keys become --key=value tokens injected
// after the subcommand name, skipping keys already given on the command
// line, so explicit flags always win.
std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        const std::size_t b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const std::size_t e = s.find_last_not_of(ws);
        s = s.substr(b, e - b + 1);
        if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                              (s.front() == '\'' && s.back() == '\'')))
            s = s.substr(1, s.size() - 2);
        return s;
    };
    while (std::getline(is, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + line);
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line has an empty key: " + line);
        kv.emplace_back(key, trim(t.substr(eq + 1)));
    }
    return kv;
}

std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
    std::string cfg_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            cfg_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            cfg_path = args[i].substr(9);
    }
    if (cfg_path.empty()) return args;

    std::size_t sub_pos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i)
        if (!args[i].empty() && args[i][0] != '-') {
            sub_pos = i + 1;
            break;
        }

    std::vector<std::string> given;
    for (const std::string& a : args)
        if (a.rfind("--", 0) == 0) given.push_back(a.substr(0, a.find('=')));

    std::vector<std::string> out(args.begin(), args.begin() + sub_pos);
    for (const auto& [k, v] : read_flat_config(cfg_path)) {
        const std::string flag = "--" + k;
        if (k == "config" || std::find(given.begin(), given.end(), flag) != given.end()) continue;
        out.push_back(flag + "=" + v);
    }
    out.insert(out.end(), args.begin() + sub_pos, args.end());
    return out;
}

std::vector<double> parse_csv_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw CLI::ValidationError(std::string(what) + ": bad number '" + tok + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError(std::string(what) + ": empty list");
    return out;
}

std::vector<int> parse_csv_ints(const std::string& s, const char* what) {
    std::vector<int> out;
    for (double d : parse_csv_doubles(s, what)) out.push_back(int(d));
    return out;
}

ImageGrid make_grid(int size, double pixel_size) {
    ImageGrid g{size, pixel_size > 0.0 ? pixel_size : 2.0 / double(size > 0 ? size : 1)};
    g.validate();
    return g;
}

std::vector<std::string> list_timg(const std::string& dir) {
    std::vector<std::string> paths;
    if (!fs::is_directory(dir))
        throw std::invalid_argument("not a directory: " + dir);
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".timg")
            paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw std::invalid_argument("no .timg files in " + dir);
    return paths;
}

std::vector<Image> load_image_dir(const std::string& dir) {
    std::vector<Image> out;
    for (const std::string& p : list_timg(dir)) out.push_back(read_timg(p));
    for (const Image& im : out)
        if (!(im.grid == out.front().grid))
            throw std::invalid_argument("mixed image grids in " + dir);
    return out;
}

void export_pgm(const Image& img, const std::string& path, const std::string& win) {
    const std::vector<double> w = parse_csv_doubles(win, "--win");
    if (w.size() != 2) throw std::invalid_argument("--win needs lo,hi");
    write_pgm(img, path, w[0], w[1]);
}

DegradationTask parse_task(const std::string& s) {
    if (s == "none") return DegradationTask::none;
    if (s == "lowdose") return DegradationTask::low_dose;
    if (s == "sparse") return DegradationTask::sparse_view;
    if (s == "mar") return DegradationTask::metal;
    throw std::invalid_argument("unknown task: " + s);
}

// ---------------------------------------------------------------- phantom

struct PhantomArgs {
    int size = 128;
    double pixel_size = 0.0;
    std::string out;
    std::vector<std::string> metal;
    std::string mask_out;
    int variants = 0;
    double jitter = 0.1;
    std::uint64_t seed = 0;
    std::string pgm, win = "0,1";
};

int cmd_phantom(const PhantomArgs& a) {
    const ImageGrid g = make_grid(a.size, a.pixel_size);
    if (a.out.empty()) throw std::invalid_argument("phantom: --out is required");

    if (a.variants > 0) {
        const std::vector<Image> set = make_phantom_variants(g, a.variants, a.seed, a.jitter);
        fs::create_directories(a.out);
        for (std::size_t k = 0; k < set.size(); ++k) {
            std::ostringstream name;
            name << "variant_" << std::setw(3) << std::setfill('0') << k << ".timg";
            write_timg(set[k], (fs::path(a.out) / name.str()).string());
        }
        std::cout << "wrote " << set.size() << " variants to " << a.out << "\n";
        return 0;
    }

    Image img = shepp_logan(g);
    std::vector<MetalDisc> discs;
    for (const std::string& m : a.metal) {
        const std::vector<double> f = parse_csv_doubles(m, "--metal");
        if (f.size() != 3 && f.size() != 4)
            throw std::invalid_argument("--metal needs cx,cy,r[,intensity]");
        MetalDisc d;
        d.cx = f[0];
        d.cy = f[1];
        d.r = f[2];
        if (f.size() == 4) d.intensity = f[3];
        discs.push_back(d);
    }

    PixelMask mask(g, false);
    if (!discs.empty()) mask = insert_metal(img, discs);

    write_timg(img, a.out);
    if (!discs.empty()) {
        std::string mp = a.mask_out;
        if (mp.empty()) mp = fs::path(a.out).replace_extension(".mask.timg").string();
        write_mask(mask, mp);
        std::cout << "wrote " << a.out << " and " << mp << "\n";
    } else {
        std::cout << "wrote " << a.out << "\n";
    }
    if (!a.pgm.empty()) export_pgm(img, a.pgm, a.win);
    return 0;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string task = "none";
    std::string in, out;
    int full_views = 360;
    double dose = 0.25;
    double i0 = 1.0e5;
    int views = 96;
    std::string mask;
    int trace_margin = 1;
    std::string trace_out;
    std::string metal_mode = "saturate";
    std::string clean_out;
    std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& a) {
    if (a.in.empty() || a.out.empty())
        throw std::invalid_argument("simulate: --in and --out are required");
    const DegradationTask task = parse_task(a.task);
    const Image ph = read_timg(a.in);
    const ScanGeometry geo = make_parallel_geometry(a.full_views, ph.grid);

    PixelMask mask(ph.grid, false);
    MetalCorruption mode = MetalCorruption::saturate;
    if (task == DegradationTask::metal) {
        if (a.mask.empty()) throw std::invalid_argument("simulate: --task mar needs --mask");
        mask = read_pixel_mask(a.mask);
        if (!(mask.grid == ph.grid))
            throw std::invalid_argument("simulate: mask grid does not match the phantom");
        if (a.metal_mode == "void")
            mode = MetalCorruption::void_out;
        else if (a.metal_mode != "saturate")
            throw std::invalid_argument("simulate: --metal-mode must be saturate or void");
    }

    const Sinogram clean = forward_project(ph, geo);
    Sinogram out = clean;
    switch (task) {
        case DegradationTask::none:
            break;
        case DegradationTask::low_dose: {
            NoiseModel nm;
            nm.dose = a.dose;
            nm.I0 = a.i0;
            nm.seed = a.seed;
            out = apply_low_dose(clean, nm);
            break;
        }
        case DegradationTask::sparse_view:
            out = subsample_views(clean, a.views);
            break;
        case DegradationTask::metal: {
            const TraceMask trace = compute_trace(mask, geo, a.trace_margin);
            out = corrupt_metal_sinogram(clean, trace, mode);
            std::string tp = a.trace_out;
            if (tp.empty()) tp = fs::path(a.out).replace_extension(".trace.tsin").string();
            write_trace(trace, tp);
            std::cout << "wrote trace " << tp << "\n";
            break;
        }
    }

    write_tsin(out, a.out);
    if (!a.clean_out.empty()) write_tsin(clean, a.clean_out);
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
    std::string data, out;
    int steps = 2000;
    std::string hidden = "64";
    double d = 128.0;
    double sigma_data = 0.5;
    double p_mean = -1.2;
    double p_std = 1.2;
    double lr_max = 1.0e-2;
    double lr_min = 1.0e-4;
    std::string loss_log;
    std::string resume;
    std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a) {
    if (a.data.empty() || a.out.empty())
        throw std::invalid_argument("train: --data and --out are required");
    if (a.steps < 1) throw std::invalid_argument("train: --steps must be >= 1");
    if (!(a.lr_max >= a.lr_min && a.lr_min > 0.0))
        throw std::invalid_argument("train: need lr-max >= lr-min > 0");
    const std::vector<Image> data = load_image_dir(a.data);
    const int n_pixels = int(data.front().size());

    PfgmConfig cfg;
    cfg.D = a.d;
    cfg.sigma_data = a.sigma_data;
    cfg.p_mean = a.p_mean;
    cfg.p_std = a.p_std;

    ToyNet net;
    if (!a.resume.empty()) {
        Checkpoint ck = load_checkpoint(a.resume);
        net = std::move(ck.net);
        cfg.sigma_data = ck.sigma_data;
        cfg.D = ck.D;
        if (net.n_pixels != n_pixels)
            throw std::invalid_argument("train: checkpoint does not match the dataset size");
    } else {
        net = make_toynet(n_pixels, parse_csv_ints(a.hidden, "--hidden"), a.seed);
    }
    cfg.validate();
    net.validate();

    std::ofstream log;
    if (!a.loss_log.empty()) {
        log.open(a.loss_log);
        if (!log) throw std::invalid_argument("train: cannot open " + a.loss_log);
        log << "step,loss\n";
    }

    std::mt19937_64 rng(a.seed + 1);
    for (int step = 0; step < a.steps; ++step) {
        const double lr =
            a.lr_min + (a.lr_max - a.lr_min) * 0.5 * (1.0 + std::cos(kPi * double(step) / a.steps));
        const double loss = train_step(net, data, cfg, rng, lr);
        if (!std::isfinite(loss)) throw NumericalError("train: loss became non-finite");
        if (log) log << step << ',' << loss << '\n';
    }

    save_checkpoint(net, cfg, a.out);
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

// ------------------------------------------------------------ reconstruct

struct ReconstructArgs {
    std::string in, out;
    std::string method = "fbp";
    std::string task = "none";
    int size = 128;
    double pixel_size = 0.0;
    std::string filter = "ramlak";
    std::string checkpoint, analytic;
    double d = 128.0;
    double sigma_data = 0.5;
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;
    int t = 25;
    double sigma_start = 0.0;
    double lambda_tv = 0.0;
    int tv_iters = 30;
    bool no_momentum = false;
    std::string init_norm = "shell";
    std::string conditioning = "auto";
    double eta = 1.0;
    int cg_iters = 30;
    int subsets = 8;
    int passes = 1;
    double omega = 1.0;
    std::string trace;
    std::string diag;
    std::uint64_t seed = 0;
    std::string pgm, win = "0,1";
};

FilterSpec parse_filter(const std::string& s) {
    FilterSpec fs;
    if (s == "hann")
        fs.apodization = Apodization::hann;
    else if (s != "ramlak")
        throw std::invalid_argument("unknown filter: " + s);
    return fs;
}

int cmd_reconstruct(const ReconstructArgs& a) {
    if (a.in.empty() || a.out.empty())
        throw std::invalid_argument("reconstruct: --in and --out are required");
    const ImageGrid g = make_grid(a.size, a.pixel_size);
    const FilterSpec filt = parse_filter(a.filter);
    const DegradationTask task = parse_task(a.task);
    const Sinogram sino = read_tsin(a.in);

    std::unique_ptr<TraceMask> trace;
    if (!a.trace.empty()) trace = std::make_unique<TraceMask>(read_trace(a.trace));

    Image result(g, 0.0);
    if (a.method == "fbp") {
        result = fbp(sino, g, filt);
    } else if (a.method == "ossart") {
        OsSartConfig cfg;
        cfg.n_subsets = a.subsets;
        cfg.passes = a.passes;
        cfg.omega = a.omega;
        result = os_sart(sino, g, Image(g, 0.0), cfg);
    } else if (a.method == "limar") {
        if (!trace) throw std::invalid_argument("reconstruct: --method limar needs --trace");
        result = fbp(li_mar(sino, *trace), g, filt);
    } else if (a.method == "force") {
        PfgmConfig pf;
        pf.D = a.d;
        pf.sigma_data = a.sigma_data;
        pf.sigma_min = a.sigma_min;
        pf.sigma_max = a.sigma_max;
        pf.rho = a.rho;

        std::unique_ptr<Denoiser> den;
        if (!a.checkpoint.empty()) {
            Checkpoint ck = load_checkpoint(a.checkpoint);
            pf.sigma_data = ck.sigma_data;
            pf.D = ck.D;
            if (ck.net.n_pixels != g.n * g.n)
                throw std::invalid_argument("reconstruct: checkpoint does not match --size");
            den = std::make_unique<ToyNetDenoiser>(std::move(ck.net), pf);
        } else if (!a.analytic.empty()) {
            DiscreteDataset ds{load_image_dir(a.analytic)};
            if (!(ds.items.front().grid == g))
                throw std::invalid_argument("reconstruct: --analytic grid does not match --size");
            den = std::make_unique<AnalyticDenoiser>(std::move(ds), pf);
        } else {
            throw std::invalid_argument(
                "reconstruct: --method force needs --checkpoint or --analytic");
        }
        pf.validate();

        ConditioningSpec spec;
        if (a.conditioning == "auto") {
            if (task == DegradationTask::metal && !trace)
                throw std::invalid_argument("reconstruct: --task mar needs --trace");
            spec = default_conditioning(task, trace.get());
        } else if (a.conditioning == "none") {
            spec = NoConditioning{};
        } else if (a.conditioning == "red") {
            spec = RedConditioning{};
        } else if (a.conditioning == "ossart") {
            spec = OsSartConditioning{};
        } else if (a.conditioning == "mar") {
            if (!trace) throw std::invalid_argument("reconstruct: --conditioning mar needs --trace");
            MarConditioning m;
            m.trace = *trace;
            spec = std::move(m);
        } else {
            throw std::invalid_argument("unknown conditioning: " + a.conditioning);
        }
        if (auto* red = std::get_if<RedConditioning>(&spec)) {
            red->red.eta = a.eta;
            red->red.cg_iters = a.cg_iters;
        } else if (auto* sart = std::get_if<OsSartConditioning>(&spec)) {
            sart->sart.n_subsets = a.subsets;
            sart->sart.passes = a.passes;
            sart->sart.omega = a.omega;
        } else if (auto* mar = std::get_if<MarConditioning>(&spec)) {
            mar->filter = filt;
        }

        SamplerConfig cfg;
        cfg.T = a.t;
        cfg.sigma_start = a.sigma_start;
        cfg.lambda_tv = a.lambda_tv;
        cfg.tv_iters = a.tv_iters;
        cfg.momentum = !a.no_momentum;
        cfg.init_norm =
            a.init_norm == "gauss" ? InitNorm::gaussian_match : InitNorm::augmented_shell;
        if (a.init_norm != "gauss" && a.init_norm != "shell")
            throw std::invalid_argument("unknown init norm: " + a.init_norm);
        cfg.seed = a.seed;

        std::ofstream diag;
        std::ostream* diag_ptr = nullptr;
        if (!a.diag.empty()) {
            diag.open(a.diag);
            if (!diag) throw std::invalid_argument("reconstruct: cannot open " + a.diag);
            diag_ptr = &diag;
        }
        const char* kind = std::holds_alternative<RedConditioning>(spec)      ? "red"
                           : std::holds_alternative<OsSartConditioning>(spec) ? "ossart"
                           : std::holds_alternative<MarConditioning>(spec)    ? "mar"
                                                                              : "none";
        std::cout << "conditioning: " << kind << "\n";
        result = force_reconstruct(sino, g, spec, *den, pf, cfg, diag_ptr);
    } else {
        throw std::invalid_argument("unknown method: " + a.method);
    }

    write_timg(result, a.out);
    if (!a.pgm.empty()) export_pgm(result, a.pgm, a.win);
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

// --------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::vector<std::string> in;
    std::string ref;
    std::string out;
    double data_range = 1.0;
    std::vector<std::string> name;
    bool phase_scan_mode = false;
    std::string in_dir, ref_dir;
    std::string sigmas = "0,0.05,0.1,0.2,0.4,0.8,1.6,3.2";
    int patch = 4;
    std::uint64_t seed = 0;
};

int cmd_evaluate(const EvaluateArgs& a) {
    std::ostringstream body;
    if (a.phase_scan_mode) {
        if (a.in_dir.empty() || a.ref_dir.empty())
            throw std::invalid_argument("evaluate: --phase-scan needs --in-dir and --ref-dir");
        const std::vector<Image> corrupted = load_image_dir(a.in_dir);
        const std::vector<Image> clean = load_image_dir(a.ref_dir);
        const std::vector<double> sig = parse_csv_doubles(a.sigmas, "--sigmas");
        const auto pts = phase_scan(corrupted, clean, sig, a.seed, a.patch);
        body << "sigma,distance\n";
        for (const auto& p : pts) body << p.sigma << ',' << p.distance2 << '\n';
    } else {
        if (a.in.empty() || a.ref.empty())
            throw std::invalid_argument("evaluate: --in and --ref are required");
        const Image ref = read_timg(a.ref);
        std::vector<std::pair<std::string, MetricReport>> rows;
        for (std::size_t k = 0; k < a.in.size(); ++k) {
            const Image x = read_timg(a.in[k]);
            const std::string label = k < a.name.size() ? a.name[k] : a.in[k];
            rows.emplace_back(label, evaluate_pair(x, ref, a.data_range));
        }
        write_metrics_csv(body, rows);
    }

    if (a.out.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream os(a.out);
        if (!os) throw std::invalid_argument("evaluate: cannot open " + a.out);
        os << body.str();
        std::cout << "wrote " << a.out << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel-beam CT reconstruction workbench"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

    std::string config_path;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value config file; flags win");
        sub->add_option("--threads", threads, "worker thread cap (0 = hardware)");
    };

    PhantomArgs pa;
    CLI::App* sp = app.add_subcommand("phantom", "render a head phantom");
    add_common(sp);
    sp->add_option("--size", pa.size, "pixels per side");
    sp->add_option("--pixel-size", pa.pixel_size, "physical pixel width (0 = 2/size)");
    sp->add_option("--out", pa.out, "output .timg path (directory with --variants)");
    sp->add_option("--metal", pa.metal, "metal disc cx,cy,r[,intensity]; repeatable");
    sp->add_option("--mask-out", pa.mask_out, "metal mask output path");
    sp->add_option("--variants", pa.variants, "write this many jittered variants instead");
    sp->add_option("--jitter", pa.jitter, "variant jitter amplitude");
    sp->add_option("--seed", pa.seed, "variant seed");
    sp->add_option("--pgm", pa.pgm, "also export an 8-bit preview");
    sp->add_option("--win", pa.win, "preview display window lo,hi");

    SimulateArgs sa;
    CLI::App* ss = app.add_subcommand("simulate", "forward-project and degrade");
    add_common(ss);
    ss->add_option("--task", sa.task, "none|lowdose|sparse|mar");
    ss->add_option("--in", sa.in, "phantom .timg");
    ss->add_option("--out", sa.out, "output .tsin");
    ss->add_option("--full-views", sa.full_views, "views in the clean scan");
    ss->add_option("--dose", sa.dose, "low-dose flux fraction");
    ss->add_option("--i0", sa.i0, "full-dose photons per ray");
    ss->add_option("--views", sa.views, "views kept by the sparse task");
    ss->add_option("--mask", sa.mask, "metal pixel mask .timg (mar task)");
    ss->add_option("--trace-margin", sa.trace_margin, "detector dilation of the metal trace");
    ss->add_option("--trace-out", sa.trace_out, "trace output path (mar task)");
    ss->add_option("--metal-mode", sa.metal_mode, "saturate|void");
    ss->add_option("--clean-out", sa.clean_out, "also write the clean sinogram");
    ss->add_option("--seed", sa.seed, "noise seed");

    TrainArgs ta;
    CLI::App* st = app.add_subcommand("train", "train the denoiser prior");
    add_common(st);
    st->add_option("--data", ta.data, "directory of .timg images");
    st->add_option("--out", ta.out, "checkpoint output path");
    st->add_option("--steps", ta.steps, "SGD steps");
    st->add_option("--hidden", ta.hidden, "hidden widths, comma separated");
    st->add_option("--d", ta.d, "augmentation dimensionality D");
    st->add_option("--sigma-data", ta.sigma_data, "data scale for preconditioning");
    st->add_option("--p-mean", ta.p_mean, "log-sigma sampling mean");
    st->add_option("--p-std", ta.p_std, "log-sigma sampling spread");
    st->add_option("--lr-max", ta.lr_max, "cosine schedule peak learning rate");
    st->add_option("--lr-min", ta.lr_min, "cosine schedule floor learning rate");
    st->add_option("--loss-log", ta.loss_log, "per-step loss CSV");
    st->add_option("--resume", ta.resume, "checkpoint to continue from");
    st->add_option("--seed", ta.seed, "init/draw seed");

    ReconstructArgs ra;
    CLI::App* sr = app.add_subcommand("reconstruct", "reconstruct an image from a sinogram");
    add_common(sr);
    sr->add_option("--in", ra.in, "input .tsin");
    sr->add_option("--out", ra.out, "output .timg");
    sr->add_option("--method", ra.method, "fbp|ossart|limar|force");
    sr->add_option("--task", ra.task, "none|lowdose|sparse|mar (picks force conditioning)");
    sr->add_option("--size", ra.size, "output pixels per side");
    sr->add_option("--pixel-size", ra.pixel_size, "physical pixel width (0 = 2/size)");
    sr->add_option("--filter", ra.filter, "ramlak|hann");
    sr->add_option("--checkpoint", ra.checkpoint, "trained denoiser checkpoint");
    sr->add_option("--analytic", ra.analytic, "dataset directory for the analytic denoiser");
    sr->add_option("--d", ra.d, "augmentation dimensionality D (analytic)");
    sr->add_option("--sigma-data", ra.sigma_data, "data scale (analytic)");
    sr->add_option("--sigma-min", ra.sigma_min, "schedule floor");
    sr->add_option("--sigma-max", ra.sigma_max, "schedule ceiling");
    sr->add_option("--rho", ra.rho, "schedule warp exponent");
    sr->add_option("--t", ra.t, "sampler steps");
    sr->add_option("--sigma-start", ra.sigma_start, "start level (0 = 0.4 sigma-max)");
    sr->add_option("--lambda-tv", ra.lambda_tv, "TV proximal weight");
    sr->add_option("--tv-iters", ra.tv_iters, "TV inner iterations");
    sr->add_flag("--no-momentum", ra.no_momentum, "disable the extrapolation step");
    sr->add_option("--init-norm", ra.init_norm, "shell|gauss start perturbation norm");
    sr->add_option("--conditioning", ra.conditioning, "auto|none|red|ossart|mar");
    sr->add_option("--eta", ra.eta, "RED pull strength");
    sr->add_option("--cg-iters", ra.cg_iters, "RED CG iterations");
    sr->add_option("--subsets", ra.subsets, "OS-SART subsets");
    sr->add_option("--passes", ra.passes, "OS-SART passes");
    sr->add_option("--omega", ra.omega, "OS-SART relaxation");
    sr->add_option("--trace", ra.trace, "metal trace .tsin");
    sr->add_option("--diag", ra.diag, "per-step diagnostics CSV");
    sr->add_option("--seed", ra.seed, "sampler seed");
    sr->add_option("--pgm", ra.pgm, "also export an 8-bit preview");
    sr->add_option("--win", ra.win, "preview display window lo,hi");

    EvaluateArgs ea;
    CLI::App* se = app.add_subcommand("evaluate", "metrics against a reference");
    add_common(se);
    se->add_option("--in", ea.in, "image(s) to score; repeatable");
    se->add_option("--ref", ea.ref, "reference .timg");
    se->add_option("--out", ea.out, "CSV output path (default stdout)");
    se->add_option("--data-range", ea.data_range, "dynamic range for psnr/ssim");
    se->add_option("--name", ea.name, "row label(s); defaults to the input path");
    se->add_flag("--phase-scan", ea.phase_scan_mode, "directory-vs-directory sigma scan");
    se->add_option("--in-dir", ea.in_dir, "corrupted image directory (phase scan)");
    se->add_option("--ref-dir", ea.ref_dir, "clean image directory (phase scan)");
    se->add_option("--sigmas", ea.sigmas, "scan levels, comma separated");
    se->add_option("--patch", ea.patch, "patch side for the moment summary");
    se->add_option("--seed", ea.seed, "scan noise seed");

    try {
        std::vector<std::string> args =
            merge_config_args(std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (threads > 0) set_max_threads(threads);

    try {
        if (sp->parsed()) return cmd_phantom(pa);
        if (ss->parsed()) return cmd_simulate(sa);
        if (st->parsed()) return cmd_train(ta);
        if (sr->parsed()) return cmd_reconstruct(ra);
        if (se->parsed()) return cmd_evaluate(ea);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
