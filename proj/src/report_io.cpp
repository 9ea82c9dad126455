#include "oscs/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

namespace oscs {

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("csv: row width does not match header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::ostringstream o;
    for (std::size_t i = 0; i < header_.size(); ++i) o << (i ? "," : "") << header_[i];
    o << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) o << ",";
            if (auto d = std::get_if<double>(&row[i])) o << format_real(*d);
            else if (auto l = std::get_if<long>(&row[i])) o << *l;
            else o << std::get<std::string>(row[i]);
        }
        o << "\n";
    }
    return o.str();
}

void CsvTable::write(const std::string& path) const { write_text_file(path, str()); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

nlohmann::json library_versions() {
    nlohmann::json v;
    v["fftw"] = std::string(fftw_version);
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    v["boost"] = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                 std::to_string(BOOST_VERSION % 100);
    v["openssl"] = OPENSSL_VERSION_TEXT;
    v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                         "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    return v;
}

std::string plot_script(const std::string& subcommand) {
    std::string body;
    if (subcommand == "convergence") {
        body = R"(d = pd.read_csv(os.path.join(here, "convergence.csv"))
fig, ax = plt.subplots()
for (case, k), g in d.groupby(["case", "order_k"]):
    ax.loglog(g.epsilon, g.error_norm, "o-", label=f"{case}, k={k}")
ax.set_xlabel("epsilon")
ax.set_ylabel("||exact - approximation||")
ax.legend()
fig.savefig(os.path.join(here, "convergence.png"), dpi=150)
)";
    } else if (subcommand == "application") {
        body = R"(d = pd.read_csv(os.path.join(here, "application.csv"))
fig, ax = plt.subplots()
ax.semilogx(d.epsilon, d.ratio0, "o-", label="P+,0 / P0")
ax.semilogx(d.epsilon, d.ratio1, "s-", label="P+,1 / P1")
ax.axhline(0.5, color="gray", lw=0.5)
ax.axhline(1.0, color="gray", lw=0.5)
ax.set_xlabel("epsilon")
ax.legend()
fig.savefig(os.path.join(here, "application.png"), dpi=150)
)";
    } else if (subcommand == "coeffs") {
        body = R"(d = pd.read_csv(os.path.join(here, "coeffs.csv"))
fig, axes = plt.subplots(2, 2, figsize=(9, 7))
for ax, ((l, h), g) in zip(axes.flat, d.groupby(["l", "h"])):
    for n, gn in g.groupby("n"):
        if n <= 3:
            ax.plot(gn.x, (gn.re**2 + gn.im**2) ** 0.5, label=f"n={n}")
    ax.set_title(f"l={l}, h={h}")
    ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "coeffs.png"), dpi=150)
)";
    } else if (subcommand == "evolve") {
        body = R"(d = pd.read_csv(os.path.join(here, "populations.csv"))
fig, ax = plt.subplots()
ax.semilogy(d.n, d.population, "o-")
ax.set_xlabel("oscillator level n")
ax.set_ylabel("population")
fig.savefig(os.path.join(here, "populations.png"), dpi=150)
)";
    } else if (subcommand == "check") {
        body = R"(d = pd.read_csv(os.path.join(here, "check.csv"))
print(d.to_string(index=False))
)";
    } else {
        throw std::invalid_argument("plot_script: unknown subcommand " + subcommand);
    }
    return "#!/usr/bin/env python3\n# generated by oscs " + subcommand +
           "\nimport os\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n"
           "import pandas as pd\n\nhere = os.path.dirname(os.path.abspath(__file__))\n" +
           body;
}

}  // namespace oscs
