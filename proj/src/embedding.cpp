#include "stringvec/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "stringvec/hash.hpp"
#include "stringvec/ngram.hpp"

namespace stringvec {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Mock embeddings
// ---------------------------------------------------------------------------

Vector mock_embed(std::string_view text, int dim, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("mock_embed: dim must be >= 1");
    auto grams = char_ngrams(text, 2, 4);
    if (grams.empty()) grams.push_back(std::string(text));  // short text fallback

    Vector v = Vector::Zero(dim);
    Vector g(dim);
    for (const auto& gram : grams) {
        SplitMix64 rng(mix_seed({seed, murmur64(gram, 0x6d6f636bULL)}));
        for (int i = 0; i < dim; ++i) g[i] = rng.normal();
        v += g;
    }
    double norm = v.norm();
    if (norm > 0.0) v /= norm;
    else v[0] = 1.0;  // all-cancelled sum; keep the unit-norm contract
    return v;
}

MockBackend::MockBackend(int dim, std::uint64_t seed, std::string model_id)
    : dim_(dim), seed_(seed), model_id_(std::move(model_id)) {}

std::vector<Vector> MockBackend::embed(const std::vector<std::string>& texts) {
    count(texts.size());
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(mock_embed(t, dim_, seed_));
    return out;
}

// ---------------------------------------------------------------------------
// File backend
// ---------------------------------------------------------------------------

FileBackend::FileBackend(const std::string& path, int expected_dim, std::string model_id)
    : model_id_(std::move(model_id)), path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file backend: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("file backend: bad record at line " + std::to_string(lineno) +
                                     " of " + path + ": " + e.what());
        }
        auto text = j.at("text").get<std::string>();
        const auto& arr = j.at("vector");
        Vector v(static_cast<Eigen::Index>(arr.size()));
        for (std::size_t i = 0; i < arr.size(); ++i)
            v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
        if (expected_dim > 0 && v.size() != expected_dim)
            throw std::runtime_error("file backend: dimension mismatch at line " +
                                     std::to_string(lineno));
        vectors_[std::move(text)] = std::move(v);
    }
}

std::vector<Vector> FileBackend::embed(const std::vector<std::string>& texts) {
    count(texts.size());
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto it = vectors_.find(t);
        if (it == vectors_.end())
            throw std::runtime_error("file backend: no vector for text \"" + t + "\" in " + path_);
        out.push_back(it->second);
    }
    return out;
}

// ---------------------------------------------------------------------------
// HTTP backend
// ---------------------------------------------------------------------------

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
    if (config_.batch_size < 1) throw std::invalid_argument("http backend: batch_size must be >= 1");
    if (config_.api_key.empty()) {
        if (const char* key = std::getenv("STRINGVEC_API_KEY")) config_.api_key = key;
    }
}

std::vector<Vector> HttpBackend::embed_one_batch(const std::vector<std::string>& batch) {
    json body = {{"model", config_.model_id}, {"input", batch}};
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(config_.retry_backoff_ms) * (1LL << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(config_.endpoint);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        requests_.fetch_add(1);
        auto res = client.Post("/v1/embeddings", headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw std::runtime_error("http backend: status " + std::to_string(res->status) + ": " +
                                     res->body);

        json parsed = json::parse(res->body);
        const auto& data = parsed.at("data");
        if (data.size() != batch.size())
            throw std::runtime_error("http backend: response size mismatch");
        std::vector<Vector> out;
        out.reserve(batch.size());
        for (const auto& item : data) {
            const auto& arr = item.at("embedding");
            Vector v(static_cast<Eigen::Index>(arr.size()));
            for (std::size_t i = 0; i < arr.size(); ++i)
                v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
            out.push_back(std::move(v));
        }
        return out;
    }
    throw std::runtime_error("http backend: exhausted retries (" + last_error + ")");
}

std::vector<Vector> HttpBackend::embed(const std::vector<std::string>& texts) {
    count(texts.size());
    const std::size_t batch = static_cast<std::size_t>(config_.batch_size);
    const std::size_t n_batches = (texts.size() + batch - 1) / batch;

    std::vector<std::vector<std::string>> batches;
    batches.reserve(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        auto begin = texts.begin() + static_cast<std::ptrdiff_t>(b * batch);
        auto end = texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(), (b + 1) * batch));
        batches.emplace_back(begin, end);
    }

    // Bounded number of in-flight requests; assembly by batch index keeps the
    // result deterministic regardless of completion order.
    std::vector<std::vector<Vector>> results(n_batches);
    const std::size_t inflight = std::max(1, config_.max_inflight);
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> workers;
    std::mutex error_mutex;
    std::exception_ptr first_error;

    for (std::size_t w = 0; w < std::min(inflight, n_batches); ++w) {
        workers.push_back(std::async(std::launch::async, [&] {
            for (;;) {
                std::size_t b = next.fetch_add(1);
                if (b >= n_batches) return;
                try {
                    results[b] = embed_one_batch(batches[b]);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        }));
    }
    for (auto& w : workers) w.get();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<Vector> out;
    out.reserve(texts.size());
    for (auto& r : results)
        for (auto& v : r) out.push_back(std::move(v));
    return out;
}

std::unique_ptr<EmbeddingBackend> make_backend(const BackendConfig& config) {
    switch (config.kind) {
        case BackendKind::Mock:
            return std::make_unique<MockBackend>(config.dim, config.seed, config.model_id);
        case BackendKind::File:
            return std::make_unique<FileBackend>(config.path, config.dim, config.model_id);
        case BackendKind::Http:
            return std::make_unique<HttpBackend>(config);
    }
    throw std::invalid_argument("make_backend: unknown backend kind");
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

namespace {

std::string cache_key(const std::string& model_id, const std::string& content_hash) {
    return model_id + "\x1f" + content_hash;
}

} // namespace

EmbeddingCache EmbeddingCache::open(const std::string& path) {
    EmbeddingCache cache;
    cache.path_ = path;
    cache.mutex_ = std::make_unique<std::mutex>();

    std::string content;
    {
        std::ifstream in(path, std::ios::binary);
        if (in) {
            std::ostringstream buf;
            buf << in.rdbuf();
            content = buf.str();
        }
    }

    // Replay the journal. Records are newline-terminated JSON objects; the
    // final record may be torn by a crash and is dropped, in which case the
    // file is truncated back to the last committed byte.
    std::size_t pos = 0;
    std::size_t committed_end = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const std::size_t line_end = terminated ? nl : content.size();
        std::string_view line(content.data() + pos, line_end - pos);

        bool ok = false;
        if (!line.empty()) {
            try {
                json j = json::parse(line);
                EmbeddingCacheEntry entry;
                entry.model_id = j.at("model_id").get<std::string>();
                entry.content_hash = j.at("content_hash").get<std::string>();
                entry.dim = j.at("dim").get<int>();
                entry.vector = j.at("vector").get<std::vector<double>>();
                if (static_cast<int>(entry.vector.size()) != entry.dim)
                    throw std::runtime_error("dim mismatch");
                cache.entries_[cache_key(entry.model_id, entry.content_hash)] =
                    std::move(entry.vector);
                ok = true;
            } catch (...) {
                ok = false;
            }
        } else {
            ok = terminated;  // a blank terminated line is harmless
        }

        if (ok && terminated) {
            committed_end = nl + 1;
            pos = nl + 1;
            continue;
        }
        if (!ok) {
            // Bad or unterminated record: only acceptable as the 0x0A-free tail.
            bool has_later_content = false;
            if (terminated) {
                for (std::size_t i = nl + 1; i < content.size(); ++i) {
                    if (!std::isspace(static_cast<unsigned char>(content[i]))) {
                        has_later_content = true;
                        break;
                    }
                }
            }
            if (has_later_content)
                throw CacheIntegrityError("corrupt cache record before end of journal: " + path);
            break;  // torn tail, discard
        }
        // ok but unterminated: parsed fine yet the commit marker (newline) is
        // missing; treat as torn to keep append safety.
        break;
    }

    if (committed_end < content.size()) {
        std::error_code ec;
        std::filesystem::resize_file(path, committed_end, ec);
        // A missing file is fine; anything else surfaces on the first put.
    }

    cache.out_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
    return cache;
}

std::optional<std::vector<double>> EmbeddingCache::get(const std::string& model_id,
                                                       const std::string& content_hash) const {
    std::lock_guard lock(*mutex_);
    auto it = entries_.find(cache_key(model_id, content_hash));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::put(const EmbeddingCacheEntry& entry) {
    if (static_cast<int>(entry.vector.size()) != entry.dim)
        throw std::invalid_argument("cache put: vector size does not match dim");
    json j = {{"model_id", entry.model_id},
              {"content_hash", entry.content_hash},
              {"dim", entry.dim},
              {"vector", entry.vector}};
    std::lock_guard lock(*mutex_);
    if (!out_ || !out_->is_open()) throw std::runtime_error("cache journal is not writable: " + path_);
    *out_ << j.dump() << '\n';
    out_->flush();
    if (!*out_) throw std::runtime_error("cache journal write failed: " + path_);
    entries_[cache_key(entry.model_id, entry.content_hash)] = entry.vector;
}

std::size_t EmbeddingCache::size() const {
    std::lock_guard lock(*mutex_);
    return entries_.size();
}

// ---------------------------------------------------------------------------
// embed_batch
// ---------------------------------------------------------------------------

FeatureMatrix embed_batch(const std::vector<std::string>& texts, EmbeddingBackend& backend,
                          EmbeddingCache* cache) {
    if (texts.empty()) throw std::invalid_argument("embed_batch: texts must be non-empty");

    // Deduplicate in first-appearance order.
    std::vector<std::string> unique;
    std::unordered_map<std::string, std::size_t> slot;
    std::vector<std::size_t> row_slot(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto [it, fresh] = slot.emplace(texts[i], unique.size());
        if (fresh) unique.push_back(texts[i]);
        row_slot[i] = it->second;
    }

    std::vector<Vector> vectors(unique.size());
    std::vector<std::size_t> misses;
    std::vector<std::string> hashes(unique.size());
    for (std::size_t u = 0; u < unique.size(); ++u) {
        if (cache) {
            hashes[u] = sha256_hex(unique[u]);
            if (auto hit = cache->get(backend.model_id(), hashes[u])) {
                vectors[u] = Eigen::Map<const Vector>(hit->data(),
                                                      static_cast<Eigen::Index>(hit->size()));
                continue;
            }
        }
        misses.push_back(u);
    }

    if (!misses.empty()) {
        std::vector<std::string> miss_texts;
        miss_texts.reserve(misses.size());
        for (auto u : misses) miss_texts.push_back(unique[u]);
        auto embedded = backend.embed(miss_texts);
        if (embedded.size() != misses.size())
            throw std::runtime_error("embed_batch: backend returned wrong count");
        for (std::size_t i = 0; i < misses.size(); ++i) {
            vectors[misses[i]] = std::move(embedded[i]);
            if (cache) {
                const Vector& v = vectors[misses[i]];
                EmbeddingCacheEntry entry;
                entry.model_id = backend.model_id();
                entry.content_hash = hashes[misses[i]];
                entry.dim = static_cast<int>(v.size());
                entry.vector.assign(v.data(), v.data() + v.size());
                cache->put(entry);
            }
        }
    }

    const Eigen::Index dim = vectors.front().size();
    for (const auto& v : vectors)
        if (v.size() != dim) throw std::runtime_error("embed_batch: dimension mismatch across vectors");

    FeatureMatrix out;
    out.values.resize(static_cast<Eigen::Index>(texts.size()), dim);
    for (std::size_t i = 0; i < texts.size(); ++i)
        out.values.row(static_cast<Eigen::Index>(i)) = vectors[row_slot[i]].transpose();
    out.col_names.reserve(static_cast<std::size_t>(dim));
    for (Eigen::Index j = 0; j < dim; ++j) out.col_names.push_back("e" + std::to_string(j));
    return out;
}

FeatureMatrix embed_batch(const std::vector<std::string>& texts, const BackendConfig& config,
                          EmbeddingCache* cache) {
    auto backend = make_backend(config);
    return embed_batch(texts, *backend, cache);
}

} // namespace stringvec
