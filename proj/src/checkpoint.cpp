#include "mhpm/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mhpm/errors.hpp"

namespace mhpm {

namespace {

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
    return true;
}

}  // namespace

void Checkpoint::put(const std::string& name, std::vector<double> values) {
    require(valid_name(name), "Checkpoint: invalid record name '" + name + "'");
    arrays_[name] = std::move(values);
}

void Checkpoint::put_text(const std::string& name, std::string text) {
    require(valid_name(name), "Checkpoint: invalid record name '" + name + "'");
    require(text.find('\n') == std::string::npos, "Checkpoint: text records are single-line");
    texts_[name] = std::move(text);
}

const std::vector<double>& Checkpoint::get(const std::string& name) const {
    auto it = arrays_.find(name);
    if (it == arrays_.end()) throw ContractError("Checkpoint: missing array '" + name + "'");
    return it->second;
}

const std::string& Checkpoint::get_text(const std::string& name) const {
    auto it = texts_.find(name);
    if (it == texts_.end()) throw ContractError("Checkpoint: missing text '" + name + "'");
    return it->second;
}

void Checkpoint::write(std::ostream& os) const {
    os << "mhpm-checkpoint " << kVersion << '\n';
    char buf[32];
    for (const auto& [name, values] : arrays_) {
        os << "array " << name << ' ' << values.size() << '\n';
        for (std::size_t i = 0; i < values.size(); ++i) {
            auto res = std::to_chars(buf, buf + sizeof buf, values[i], std::chars_format::general, 17);
            os.write(buf, res.ptr - buf);
            os << ((i + 1) % 8 == 0 || i + 1 == values.size() ? '\n' : ' ');
        }
    }
    for (const auto& [name, text] : texts_) os << "text " << name << '\n' << text << '\n';
    os << "end\n";
}

Checkpoint Checkpoint::read(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (!is || magic != "mhpm-checkpoint") throw ContractError("Checkpoint: bad header");
    if (version != kVersion) throw ContractError("Checkpoint: unsupported version " + std::to_string(version));
    Checkpoint ck;
    std::string kind;
    while (is >> kind) {
        if (kind == "end") return ck;
        std::string name;
        is >> name;
        if (kind == "array") {
            std::size_t n = 0;
            is >> n;
            std::vector<double> values(n);
            std::string tok;
            for (std::size_t i = 0; i < n; ++i) {
                is >> tok;
                auto res = std::from_chars(tok.data(), tok.data() + tok.size(), values[i]);
                if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
                    throw ContractError("Checkpoint: bad number in '" + name + "'");
            }
            ck.arrays_[name] = std::move(values);
        } else if (kind == "text") {
            std::string line;
            std::getline(is, line);  // rest of the header line
            std::getline(is, line);
            ck.texts_[name] = line;
        } else {
            throw ContractError("Checkpoint: unknown record kind '" + kind + "'");
        }
        if (!is) throw ContractError("Checkpoint: truncated record '" + name + "'");
    }
    throw ContractError("Checkpoint: missing end marker");
}

void Checkpoint::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write(os);
    if (!os) throw IoError("write failed: " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read(is);
}

}  // namespace mhpm
