#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "stringvec/feature_matrix.hpp"

namespace stringvec {

enum class BackendKind { Http, File, Mock };

struct BackendConfig {
    BackendKind kind = BackendKind::Mock;
    std::string model_id = "mock";
    std::string endpoint;       // Http: base URL, POST {endpoint}/v1/embeddings
    std::string api_key;        // Http: falls back to STRINGVEC_API_KEY
    std::string path;           // File: JSON-lines {"text":..., "vector":[...]}
    int batch_size = 128;
    int max_retries = 5;
    int dim = 64;               // Mock output width; File/Http validation (0 = infer)
    std::uint64_t seed = 0;     // Mock
    int retry_backoff_ms = 1000;
    int max_inflight = 4;       // Http concurrent requests
};

/// Deterministic embedding test double. Each character n-gram of the text
/// indexes a fixed Gaussian vector through a seeded hash; the sum is
/// L2-normalized, so texts sharing n-grams correlate positively and disjoint
/// texts are near-orthogonal. Texts too short for any n-gram hash whole.
Vector mock_embed(std::string_view text, int dim, std::uint64_t seed);

struct EmbeddingCacheEntry {
    std::string model_id;
    std::string content_hash;    // sha256 hex of the exact input text
    int dim = 0;
    std::vector<double> vector;
};

struct CacheIntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Append-only JSON-lines journal keyed on (model_id, content_hash).
/// Last write wins; a torn trailing record is discarded on open; a corrupt
/// record followed by more data raises CacheIntegrityError. Readers may run
/// concurrently; writes are serialized.
class EmbeddingCache {
public:
    static EmbeddingCache open(const std::string& path);

    std::optional<std::vector<double>> get(const std::string& model_id,
                                           const std::string& content_hash) const;
    void put(const EmbeddingCacheEntry& entry);

    std::size_t size() const;
    const std::string& path() const { return path_; }

    EmbeddingCache(EmbeddingCache&&) = default;
    EmbeddingCache& operator=(EmbeddingCache&&) = default;

private:
    EmbeddingCache() = default;

    std::string path_;
    std::unordered_map<std::string, std::vector<double>> entries_;
    std::unique_ptr<std::ofstream> out_;
    mutable std::unique_ptr<std::mutex> mutex_;
};

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;

    /// Embeds texts positionally. Implementations batch internally.
    virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;

    virtual const std::string& model_id() const = 0;

    /// Number of embed() invocations and texts embedded, for cache assertions.
    std::size_t calls() const { return calls_.load(); }
    std::size_t texts_embedded() const { return texts_.load(); }

protected:
    void count(std::size_t texts) {
        calls_.fetch_add(1);
        texts_.fetch_add(texts);
    }

private:
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> texts_{0};
};

class MockBackend : public EmbeddingBackend {
public:
    explicit MockBackend(int dim = 64, std::uint64_t seed = 0, std::string model_id = "mock");
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;
    const std::string& model_id() const override { return model_id_; }

private:
    int dim_;
    std::uint64_t seed_;
    std::string model_id_;
};

class FileBackend : public EmbeddingBackend {
public:
    /// Loads the whole JSON-lines fixture; a text missing from the file is an
    /// explicit error at embed time.
    explicit FileBackend(const std::string& path, int expected_dim = 0,
                         std::string model_id = "file");
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;
    const std::string& model_id() const override { return model_id_; }

private:
    std::unordered_map<std::string, Vector> vectors_;
    std::string model_id_;
    std::string path_;
};

class HttpBackend : public EmbeddingBackend {
public:
    explicit HttpBackend(BackendConfig config);
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;
    const std::string& model_id() const override { return config_.model_id; }

    std::size_t requests() const { return requests_.load(); }

private:
    std::vector<Vector> embed_one_batch(const std::vector<std::string>& batch);

    BackendConfig config_;
    std::atomic<std::size_t> requests_{0};
};

std::unique_ptr<EmbeddingBackend> make_backend(const BackendConfig& config);

/// Embeds texts through the backend with deduplication and the cache.
/// Row i depends only on texts[i]; identical texts share one backend slot;
/// cache hits skip the backend entirely. Column names are e0..e{dim-1}.
FeatureMatrix embed_batch(const std::vector<std::string>& texts, EmbeddingBackend& backend,
                          EmbeddingCache* cache = nullptr);

FeatureMatrix embed_batch(const std::vector<std::string>& texts, const BackendConfig& config,
                          EmbeddingCache* cache = nullptr);

} // namespace stringvec
