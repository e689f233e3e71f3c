#include "bifirom/artifact_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "bifirom/nonlinear.hpp"

namespace bifirom {

namespace {

using Bytes = std::vector<std::uint8_t>;

constexpr std::uint8_t kDtypeF64 = 0;
constexpr std::uint8_t kDtypeU64 = 1;

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(Bytes& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

struct Reader {
    const Bytes& data;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) const {
        if (pos + n > data.size()) {
            throw IoError(std::string("artifact: truncated file while reading ") + what);
        }
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(data[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
    std::string str(std::size_t n, const char* what) {
        need(n, what);
        std::string s(reinterpret_cast<const char*>(data.data() + pos), n);
        pos += n;
        return s;
    }
};

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ULL;
    }
    return h;
}

struct Section {
    std::string name;
    std::uint8_t dtype;
    std::vector<std::uint64_t> dims;
    std::vector<double> f64s;
    std::vector<std::uint64_t> u64s;
};

Bytes encode_section(const Section& s) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(s.name.size()));
    out.insert(out.end(), s.name.begin(), s.name.end());
    out.push_back(s.dtype);
    out.push_back(static_cast<std::uint8_t>(s.dims.size()));
    for (auto d : s.dims) put_u64(out, d);
    if (s.dtype == kDtypeF64) {
        for (double v : s.f64s) put_f64(out, v);
    } else {
        for (auto v : s.u64s) put_u64(out, v);
    }
    return out;
}

// Row-major serialization of a column-major matrix.
Section matrix_section(const std::string& name, const DenseMatrix& M) {
    Section s{name, kDtypeF64, {M.rows(), M.cols()}, {}, {}};
    s.f64s.reserve(M.rows() * M.cols());
    for (std::size_t i = 0; i < M.rows(); ++i) {
        for (std::size_t j = 0; j < M.cols(); ++j) s.f64s.push_back(M(i, j));
    }
    return s;
}

DenseMatrix section_matrix(const Section& s) {
    if (s.dims.size() != 2) throw IoError("artifact: section '" + s.name + "' is not rank-2");
    DenseMatrix M(s.dims[0], s.dims[1]);
    std::size_t k = 0;
    for (std::size_t i = 0; i < M.rows(); ++i) {
        for (std::size_t j = 0; j < M.cols(); ++j) M(i, j) = s.f64s[k++];
    }
    return M;
}

Section points_section(const std::string& name,
                       const std::vector<ParameterPoint>& pts) {
    const std::uint64_t d = pts.empty() ? 0 : pts.front().size();
    Section s{name, kDtypeF64, {pts.size(), d}, {}, {}};
    for (const auto& p : pts) {
        for (double v : p) s.f64s.push_back(v);
    }
    return s;
}

std::vector<ParameterPoint> section_points(const Section& s) {
    if (s.dims.size() != 2) throw IoError("artifact: section '" + s.name + "' is not rank-2");
    std::vector<ParameterPoint> pts(s.dims[0], ParameterPoint(s.dims[1]));
    std::size_t k = 0;
    for (auto& p : pts) {
        for (auto& v : p) v = s.f64s[k++];
    }
    return pts;
}

const char* method_name(IterationMethod m) {
    switch (m) {
        case IterationMethod::direct: return "direct";
        case IterationMethod::picard: return "picard";
        case IterationMethod::newton: return "newton";
    }
    return "direct";
}

nlohmann::json iteration_json(const IterationConfig& c) {
    return {{"method", method_name(c.method)},
            {"tol_rel", c.tol_rel},
            {"max_iter", c.max_iter}};
}

IterationConfig iteration_from_json(const nlohmann::json& j) {
    IterationConfig c;
    c.method = parse_method(j.at("method").get<std::string>());
    c.tol_rel = j.at("tol_rel").get<double>();
    c.max_iter = j.at("max_iter").get<int>();
    return c;
}

nlohmann::json grid_json(const StructuredGrid& g) {
    return {{"nx", g.nx}, {"ny", g.ny},
            {"x_lo", g.x_lo}, {"x_hi", g.x_hi},
            {"y_lo", g.y_lo}, {"y_hi", g.y_hi}};
}

StructuredGrid grid_from_json(const nlohmann::json& j) {
    StructuredGrid g;
    g.nx = j.at("nx").get<int>();
    g.ny = j.at("ny").get<int>();
    g.x_lo = j.at("x_lo").get<double>();
    g.x_hi = j.at("x_hi").get<double>();
    g.y_lo = j.at("y_lo").get<double>();
    g.y_hi = j.at("y_hi").get<double>();
    return g;
}

}  // namespace

void save_artifact(const RomArtifact& artifact, const std::string& path) {
    artifact.validate();

    nlohmann::json meta = {
        {"tool", "bifirom 0.1.0"},
        {"problem", artifact.problem_id},
        {"hf_grid", grid_json(artifact.hf_grid)},
        {"lf_grid", grid_json(artifact.lf_grid)},
        {"n_p", artifact.n_p},
        {"N_rb_requested", artifact.N_rb_requested},
        {"N_rb", artifact.basis_size()},
        {"n_L", artifact.n_L()},
        {"n_f", artifact.n_f()},
        {"seed", artifact.seed},
        {"hf_run_count", artifact.hf_run_count},
        {"iteration_hf", iteration_json(artifact.it_hf)},
        {"iteration_lf", iteration_json(artifact.it_lf)},
        {"gamma_u_idx", artifact.gamma_u_idx},
        {"gamma_L_idx", artifact.gamma_L_idx},
        {"gamma_f_idx", artifact.gamma_f_idx},
    };
    const std::string meta_str = meta.dump();

    std::vector<Section> sections;
    sections.push_back(matrix_section("Q", artifact.Q));
    {
        const std::size_t k = artifact.basis_size();
        Section s{"L_rb_basis", kDtypeF64, {artifact.n_L(), k, k}, {}, {}};
        for (const auto& M : artifact.L_rb_basis) {
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) s.f64s.push_back(M(i, j));
            }
        }
        sections.push_back(std::move(s));
    }
    {
        const std::size_t k = artifact.basis_size();
        Section s{"f_rb_basis", kDtypeF64, {artifact.n_f(), k}, {}, {}};
        for (const auto& v : artifact.f_rb_basis) {
            s.f64s.insert(s.f64s.end(), v.begin(), v.end());
        }
        sections.push_back(std::move(s));
    }
    sections.push_back(matrix_section("G_L", artifact.G_L));
    sections.push_back(matrix_section("G_F", artifact.G_F));
    sections.push_back(matrix_section("Llow_gamma", artifact.Llow_gamma));
    sections.push_back(Section{"lf_op_scale", kDtypeF64,
                               {artifact.lf_op_scale.size()},
                               {artifact.lf_op_scale.begin(), artifact.lf_op_scale.end()},
                               {}});
    sections.push_back(matrix_section("Flow_gamma", artifact.Flow_gamma));
    sections.push_back(points_section("gamma_u", artifact.gamma_u));
    sections.push_back(points_section("gamma_L", artifact.gamma_L));
    sections.push_back(points_section("gamma_f", artifact.gamma_f));
    sections.push_back(Section{"lf_pattern_row_ptr", kDtypeU64,
                               {artifact.lf_pattern.row_ptr.size()}, {},
                               artifact.lf_pattern.row_ptr});
    sections.push_back(Section{"lf_pattern_col_idx", kDtypeU64,
                               {artifact.lf_pattern.col_idx.size()}, {},
                               artifact.lf_pattern.col_idx});

    Bytes out;
    out.insert(out.end(), {'B', 'F', 'R', 'M'});
    put_u32(out, kArtifactVersion);
    put_u32(out, static_cast<std::uint32_t>(meta_str.size()));
    out.insert(out.end(), meta_str.begin(), meta_str.end());

    std::vector<std::uint64_t> crcs;
    for (const auto& s : sections) {
        const Bytes enc = encode_section(s);
        crcs.push_back(fnv1a64(enc.data(), enc.size()));
        out.insert(out.end(), enc.begin(), enc.end());
    }
    const Bytes crc_enc =
        encode_section(Section{"crc64", kDtypeU64, {crcs.size()}, {}, crcs});
    out.insert(out.end(), crc_enc.begin(), crc_enc.end());

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("artifact: cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("artifact: write failed for '" + path + "'");
}

RomArtifact load_artifact(const std::string& path) {
    Bytes data;
    {
        std::ifstream f(path, std::ios::binary | std::ios::ate);
        if (!f) throw IoError("artifact: cannot open '" + path + "'");
        const auto size = f.tellg();
        f.seekg(0);
        data.resize(static_cast<std::size_t>(size));
        f.read(reinterpret_cast<char*>(data.data()), size);
        if (!f) throw IoError("artifact: read failed for '" + path + "'");
    }

    Reader r{data};
    const std::string magic = r.str(4, "magic");
    if (magic != "BFRM") throw IoError("artifact: bad magic bytes (not an artifact file)");
    const std::uint32_t version = r.u32("version");
    if (version != kArtifactVersion) {
        throw IoError("artifact: format version " + std::to_string(version) +
                      " not supported (reader is version " +
                      std::to_string(kArtifactVersion) + ")");
    }
    const std::uint32_t meta_len = r.u32("metadata length");
    const std::string meta_str = r.str(meta_len, "metadata");

    std::map<std::string, Section> sections;
    std::vector<std::uint64_t> crcs_stored;
    std::vector<std::uint64_t> crcs_computed;
    std::vector<std::string> order;
    while (r.pos < data.size()) {
        const std::size_t start = r.pos;
        Section s;
        const std::uint32_t name_len = r.u32("section name length");
        s.name = r.str(name_len, "section name");
        r.need(2, "section header");
        s.dtype = data[r.pos++];
        const std::uint8_t rank = data[r.pos++];
        std::uint64_t count = 1;
        for (int i = 0; i < rank; ++i) {
            s.dims.push_back(r.u64("section dims"));
            count *= s.dims.back();
        }
        if (s.dtype == kDtypeF64) {
            s.f64s.reserve(count);
            for (std::uint64_t i = 0; i < count; ++i) s.f64s.push_back(r.f64("section payload"));
        } else if (s.dtype == kDtypeU64) {
            s.u64s.reserve(count);
            for (std::uint64_t i = 0; i < count; ++i) s.u64s.push_back(r.u64("section payload"));
        } else {
            throw IoError("artifact: unknown dtype tag in section '" + s.name + "'");
        }
        if (s.name == "crc64") {
            crcs_stored = s.u64s;
        } else {
            crcs_computed.push_back(fnv1a64(data.data() + start, r.pos - start));
            order.push_back(s.name);
            sections.emplace(s.name, std::move(s));
        }
    }

    if (crcs_stored.empty()) throw IoError("artifact: missing checksum section");
    if (crcs_stored != crcs_computed) {
        throw IoError("artifact: checksum mismatch, the file is corrupted");
    }

    auto need = [&](const std::string& name) -> const Section& {
        auto it = sections.find(name);
        if (it == sections.end()) throw IoError("artifact: missing section '" + name + "'");
        return it->second;
    };

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_str);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("artifact: invalid metadata block: ") + e.what());
    }

    RomArtifact art;
    try {
        art.problem_id = meta.at("problem").get<std::string>();
        art.hf_grid = grid_from_json(meta.at("hf_grid"));
        art.lf_grid = grid_from_json(meta.at("lf_grid"));
        art.n_p = meta.at("n_p").get<std::size_t>();
        art.N_rb_requested = meta.at("N_rb_requested").get<std::size_t>();
        art.seed = meta.at("seed").get<std::uint64_t>();
        art.hf_run_count = meta.at("hf_run_count").get<std::size_t>();
        art.it_hf = iteration_from_json(meta.at("iteration_hf"));
        art.it_lf = iteration_from_json(meta.at("iteration_lf"));
        art.gamma_u_idx = meta.at("gamma_u_idx").get<std::vector<std::size_t>>();
        art.gamma_L_idx = meta.at("gamma_L_idx").get<std::vector<std::size_t>>();
        art.gamma_f_idx = meta.at("gamma_f_idx").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("artifact: incomplete metadata block: ") + e.what());
    }

    art.Q = section_matrix(need("Q"));
    {
        const Section& s = need("L_rb_basis");
        if (s.dims.size() != 3) throw IoError("artifact: L_rb_basis is not rank-3");
        const std::size_t n_L = s.dims[0], k = s.dims[1];
        if (s.dims[2] != k) throw IoError("artifact: L_rb_basis blocks not square");
        std::size_t idx = 0;
        for (std::size_t m = 0; m < n_L; ++m) {
            DenseMatrix M(k, k);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) M(i, j) = s.f64s[idx++];
            }
            art.L_rb_basis.push_back(std::move(M));
        }
    }
    {
        const Section& s = need("f_rb_basis");
        if (s.dims.size() != 2) throw IoError("artifact: f_rb_basis is not rank-2");
        const std::size_t n_f = s.dims[0], k = s.dims[1];
        std::size_t idx = 0;
        for (std::size_t m = 0; m < n_f; ++m) {
            DenseVector v(k);
            for (auto& x : v) x = s.f64s[idx++];
            art.f_rb_basis.push_back(std::move(v));
        }
    }
    art.G_L = section_matrix(need("G_L"));
    art.G_F = section_matrix(need("G_F"));
    art.Llow_gamma = section_matrix(need("Llow_gamma"));
    {
        const Section& s = need("lf_op_scale");
        if (s.dims.size() != 1) throw IoError("artifact: section 'lf_op_scale' is not rank-1");
        art.lf_op_scale.assign(s.f64s.begin(), s.f64s.end());
    }
    art.Flow_gamma = section_matrix(need("Flow_gamma"));
    art.gamma_u = section_points(need("gamma_u"));
    art.gamma_L = section_points(need("gamma_L"));
    art.gamma_f = section_points(need("gamma_f"));
    art.lf_pattern.row_ptr = need("lf_pattern_row_ptr").u64s;
    art.lf_pattern.col_idx = need("lf_pattern_col_idx").u64s;
    art.lf_pattern.n_rows = art.lf_pattern.row_ptr.size() - 1;
    art.lf_pattern.n_cols = art.lf_pattern.n_rows;

    art.validate();
    return art;
}

}  // namespace bifirom
