#include "isovolc/lmfdb.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isovolc/errors.hpp"

#ifndef ISOVOLC_NO_HTTP
#define CPPHTTPLIB_OPENSSL_SUPPORT_OFF
#include <httplib.h>
#endif

namespace isovolc {

namespace fs = std::filesystem;

namespace {

Int decode_segment(const std::string& s) {
    if (s.empty()) throw err("lmfdb_client", "BadLabel", "empty coefficient segment");
    if (s.size() > 1 && s[0] == 'a') return -decode_segment(s.substr(1));
    Int v = 0;
    for (char ch : s) {
        if (ch < 'a' || ch > 'z')
            throw err("lmfdb_client", "BadLabel", "bad character in segment");
        v = v * 26 + (ch - 'a');
    }
    return v;
}

std::string encode_segment(const Int& v0) {
    if (v0 < 0) return "a" + encode_segment(-v0);
    if (v0 == 0) return "a";
    Int v = v0;
    std::string s;
    while (v > 0) {
        Int d = fdiv_r(v, 26);
        s.insert(s.begin(), static_cast<char>('a' + d.get_ui()));
        v = fdiv_q(v, 26);
    }
    return s;
}

}  // namespace

std::string LmfdbLabel::str() const {
    std::string s = std::to_string(g) + "." + q.get_str() + ".";
    for (size_t i = 0; i < coeff_code.size(); ++i) {
        if (i) s += "_";
        s += coeff_code[i];
    }
    return s;
}

LmfdbLabel parse_label(const std::string& label) {
    LmfdbLabel out;
    size_t d1 = label.find('.');
    size_t d2 = label.find('.', d1 == std::string::npos ? d1 : d1 + 1);
    if (d1 == std::string::npos || d2 == std::string::npos)
        throw err("lmfdb_client", "BadLabel", "expected g.q.code");
    try {
        out.g = static_cast<unsigned>(std::stoul(label.substr(0, d1)));
    } catch (...) {
        throw err("lmfdb_client", "BadLabel", "bad dimension");
    }
    out.q = int_from_string(label.substr(d1 + 1, d2 - d1 - 1));
    std::string code = label.substr(d2 + 1);
    if (code.empty()) throw err("lmfdb_client", "BadLabel", "empty coefficient code");
    std::stringstream ss(code);
    std::string seg;
    while (std::getline(ss, seg, '_')) out.coeff_code.push_back(seg);
    if (out.coeff_code.size() != out.g)
        throw err("lmfdb_client", "BadLabel", "expected g coefficient segments");
    if (out.g == 0 || out.q < 2)
        throw err("lmfdb_client", "BadLabel", "bad dimension or field size");
    return out;
}

bool weil_symmetry_holds(const IntPoly& h, const Int& q) {
    int n = poly_degree(h);
    if (n < 2 || n % 2 != 0) return false;
    int g = n / 2;
    // x^{2g} h(q/x) = q^g h(x): a_i = q^{g-i} a_{2g-i} for 0 <= i <= g
    for (int i = 0; i <= g; ++i)
        if (h[i] != h[n - i] * pow_int(q, static_cast<unsigned long>(g - i))) return false;
    return true;
}

WeilRecord decode_label(const std::string& label) {
    LmfdbLabel lab = parse_label(label);
    unsigned g = lab.g;
    size_t n = 2 * g;
    IntPoly h(n + 1);
    h[n] = 1;
    std::vector<Int> a(g + 1);
    a[0] = 1;
    for (unsigned i = 1; i <= g; ++i) {
        a[i] = decode_segment(lab.coeff_code[i - 1]);
        h[n - i] = a[i];
    }
    for (unsigned i = 0; i < g; ++i)
        h[i] = a[i] * pow_int(lab.q, static_cast<unsigned long>(g - i));
    WeilRecord rec;
    rec.label = label;
    rec.g = g;
    rec.q = lab.q;
    auto fac = factorize(lab.q);
    if (fac.size() != 1) throw err("lmfdb_client", "BadLabel", "q is not a prime power");
    rec.p = fac.begin()->first;
    rec.h = h;
    if (!weil_symmetry_holds(rec.h, rec.q))
        throw err("lmfdb_client", "BadLabel", "decoded polynomial fails the q-symmetry");
    return rec;
}

std::string encode_label(unsigned g, const Int& q, const IntPoly& h) {
    if (poly_degree(h) != static_cast<int>(2 * g))
        throw err("lmfdb_client", "BadLabel", "degree mismatch");
    std::string code;
    for (unsigned i = 1; i <= g; ++i) {
        if (i > 1) code += "_";
        code += encode_segment(h[2 * g - i]);
    }
    return std::to_string(g) + "." + q.get_str() + "." + code;
}

std::string default_cache_dir() {
    if (const char* env = std::getenv("ISOVOLC_CACHE_DIR")) return env;
    if (const char* home = std::getenv("HOME"))
        return std::string(home) + "/.cache/isovolc";
    return "/tmp/isovolc-cache";
}

std::string fixture_dir() {
    if (const char* env = std::getenv("ISOVOLC_FIXTURES")) return env;
#ifdef ISOVOLC_FIXTURE_DIR
    return ISOVOLC_FIXTURE_DIR;
#else
    return "fixtures";
#endif
}

namespace {

WeilRecord record_from_json(const std::string& label, const nlohmann::json& j) {
    try {
        WeilRecord rec;
        rec.label = label;
        rec.g = j.at("g").get<unsigned>();
        rec.q = int_from_string(j.at("q").get<std::string>());
        rec.p = int_from_string(j.at("p").get<std::string>());
        for (const auto& c : j.at("h")) rec.h.push_back(int_from_string(c.get<std::string>()));
        if (j.contains("is_ordinary") && !j["is_ordinary"].is_null())
            rec.is_ordinary = j["is_ordinary"].get<bool>();
        if (!weil_symmetry_holds(rec.h, rec.q))
            throw err("lmfdb_client", "UpstreamSchemaChange",
                      "record fails the q-Weil symmetry");
        return rec;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw err("lmfdb_client", "UpstreamSchemaChange", e.what());
    }
}

nlohmann::json record_to_json(const WeilRecord& rec) {
    nlohmann::json j;
    j["g"] = rec.g;
    j["q"] = rec.q.get_str();
    j["p"] = rec.p.get_str();
    nlohmann::json hh = nlohmann::json::array();
    for (const auto& c : rec.h) hh.push_back(c.get_str());
    j["h"] = hh;
    if (rec.is_ordinary)
        j["is_ordinary"] = *rec.is_ordinary;
    else
        j["is_ordinary"] = nullptr;
    return j;
}

// per-label single-flight guard
std::mutex g_flight_mutex;
std::map<std::string, std::shared_ptr<std::mutex>> g_flights;

std::shared_ptr<std::mutex> flight_for(const std::string& label) {
    std::lock_guard<std::mutex> lk(g_flight_mutex);
    auto& slot = g_flights[label];
    if (!slot) slot = std::make_shared<std::mutex>();
    return slot;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        out << content;
    }
    fs::rename(tmp, path);
}

}  // namespace

WeilRecord fetch(const std::string& label, const FetchOptions& opts) {
    parse_label(label);  // validate syntax up front
    auto guard = flight_for(label);
    std::lock_guard<std::mutex> lk(*guard);

    std::string cache = opts.cache_dir.empty() ? default_cache_dir() : opts.cache_dir;
    fs::path cache_file = fs::path(cache) / (label + ".json");
    if (fs::exists(cache_file)) {
        std::ifstream in(cache_file);
        std::stringstream ss;
        ss << in.rdbuf();
        return record_from_json(label, nlohmann::json::parse(ss.str()));
    }
    fs::path fixture = fs::path(fixture_dir()) / "v1" / (label + ".json");
    if (fs::exists(fixture)) {
        std::ifstream in(fixture);
        std::stringstream ss;
        ss << in.rdbuf();
        WeilRecord rec = record_from_json(label, nlohmann::json::parse(ss.str()));
        atomic_write(cache_file, record_to_json(rec).dump(2));
        return rec;
    }
    if (opts.offline)
        throw err("lmfdb_client", "NetworkUnavailable",
                  "offline and no cache or fixture for " + label);
#ifdef ISOVOLC_NO_HTTP
    throw err("lmfdb_client", "NetworkUnavailable", "built without HTTP support");
#else
    std::string endpoint = opts.endpoint;
    if (endpoint.empty()) {
        if (const char* env = std::getenv("ISOVOLC_ENDPOINT")) endpoint = env;
    }
    if (endpoint.empty()) endpoint = "https://abvar.lmfdb.xyz";
    // endpoint host/path split
    std::string host = endpoint, prefix;
    auto pos = endpoint.find('/', endpoint.find("//") + 2);
    if (pos != std::string::npos) {
        host = endpoint.substr(0, pos);
        prefix = endpoint.substr(pos);
    }
    httplib::Client cli(host);
    cli.set_connection_timeout(10);
    auto res = cli.Get(prefix + "/api/av_fq_isog/?label=" + label + "&_format=json");
    if (!res || res->status != 200)
        throw err("lmfdb_client", "NetworkUnavailable", "fetch failed for " + label);
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (...) {
        throw err("lmfdb_client", "UpstreamSchemaChange", "response is not JSON");
    }
    // expected: data[0] with poly coefficients; fall back to local decoding of
    // the label itself, which carries the full polynomial
    WeilRecord rec = decode_label(label);
    if (body.contains("data") && body["data"].is_array() && !body["data"].empty()) {
        const auto& d = body["data"][0];
        if (d.contains("is_ordinary")) rec.is_ordinary = d["is_ordinary"].get<bool>();
    }
    atomic_write(cache_file, record_to_json(rec).dump(2));
    return rec;
#endif
}

}  // namespace isovolc
