#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jl/io.hpp"

namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("jl_test_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(VectorFile, RoundTripAndByteLayout) {
    const std::vector<jl::Vector> rows{{1.0, -2.5, 3.25}, {0.0, 1e-300, 42.0}};
    std::stringstream buf;
    jl::write_vectors(buf, rows);
    const std::string bytes = buf.str();
    EXPECT_EQ(bytes.size(), 16u + 8u * 3u * 2u);
    EXPECT_EQ(bytes.substr(0, 4), "JLV1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3u);  // dim, little-endian
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2u);  // count
    std::stringstream in(bytes);
    EXPECT_EQ(jl::read_vectors(in), rows);
}

TEST(VectorFile, WritesAreByteStable) {
    const std::vector<jl::Vector> rows{{0.1, 0.2}, {0.3, 0.4}, {-1.0, 2.0}};
    std::stringstream a, b;
    jl::write_vectors(a, rows);
    jl::write_vectors(b, rows);
    EXPECT_EQ(a.str(), b.str());
}

TEST(VectorFile, RejectsCorruptInput) {
    std::stringstream bad_magic("XXXX\x01\x00\x00\x00");
    EXPECT_THROW(jl::read_vectors(bad_magic), jl::ParseError);
    std::stringstream truncated("JLV1\x02\x00");
    EXPECT_THROW(jl::read_vectors(truncated), jl::ParseError);
    std::vector<jl::Vector> rows{{1.0}};
    std::stringstream ok;
    jl::write_vectors(ok, rows);
    std::string bytes = ok.str();
    bytes.resize(bytes.size() - 3);  // cut into the payload
    std::stringstream cut(bytes);
    EXPECT_THROW(jl::read_vectors(cut), jl::ParseError);
    EXPECT_THROW(jl::write_vectors(ok, {}), std::invalid_argument);
}

TEST(VectorFile, FileHelpers) {
    const std::string path = temp_path("vectors.jlv");
    const std::vector<jl::Vector> rows{{5.0, 6.0, 7.0, 8.0}};
    jl::write_vectors_file(path, rows);
    EXPECT_EQ(fs::file_size(path), 16u + 32u);
    EXPECT_EQ(jl::read_vectors_file(path), rows);
    fs::remove(path);
    EXPECT_THROW(jl::read_vectors_file(path), jl::IoError);
}

TEST(VectorCsv, RoundTripAndErrors) {
    const std::vector<jl::Vector> rows{{1.5, -2.0}, {3.0, 4.25}};
    std::stringstream buf;
    jl::write_vectors_csv(buf, rows);
    std::stringstream in(buf.str());
    EXPECT_EQ(jl::read_vectors_csv(in), rows);
    std::stringstream ragged("1,2\n3\n");
    EXPECT_THROW(jl::read_vectors_csv(ragged), jl::ParseError);
    std::stringstream junk("1,abc\n");
    EXPECT_THROW(jl::read_vectors_csv(junk), jl::ParseError);
    std::stringstream empty;
    EXPECT_THROW(jl::read_vectors_csv(empty), jl::ParseError);
}

TEST(StreamFile, ParsesUpdatesHeaderAndBlanks) {
    std::stringstream in("#d=100 M=50\n3,5\n\n17,-12\n  \n99,1\n");
    const auto sf = jl::read_stream(in);
    EXPECT_EQ(sf.declared_d, 100u);
    EXPECT_EQ(sf.declared_m, 50);
    ASSERT_EQ(sf.updates.size(), 3u);
    EXPECT_EQ(sf.updates[0].index, 3u);
    EXPECT_EQ(sf.updates[0].value, 5);
    EXPECT_EQ(sf.updates[1].value, -12);
}

TEST(StreamFile, RejectsMalformedLines) {
    std::stringstream no_comma("12 5\n");
    EXPECT_THROW(jl::read_stream(no_comma), jl::ParseError);
    std::stringstream junk("a,b\n");
    EXPECT_THROW(jl::read_stream(junk), jl::ParseError);
    std::stringstream out_of_range("#d=10 M=5\n12,1\n");
    EXPECT_THROW(jl::read_stream(out_of_range), jl::ParseError);
    std::stringstream too_big("#d=10 M=5\n2,9\n");
    EXPECT_THROW(jl::read_stream(too_big), jl::ParseError);
}

// ---------------------------------------------------------------------------
// End-to-end checks of the command-line binary.
// ---------------------------------------------------------------------------

int run_cli(const std::string& args, std::string* out = nullptr) {
    const std::string cmd = std::string(JL_CLI_PATH) + " " + args;
    if (!out) return std::system((cmd + " > /dev/null 2>&1").c_str());
    const std::string path = temp_path("cli_stdout.txt");
    const int rc = std::system((cmd + " > " + path + " 2>/dev/null").c_str());
    *out = slurp(path);
    fs::remove(path);
    return rc;
}

int exit_code(int rc) { return WEXITSTATUS(rc); }

TEST(Cli, GenProducesDeterministicFile) {
    const std::string out1 = temp_path("gen1.jlv");
    const std::string out2 = temp_path("gen2.jlv");
    ASSERT_EQ(exit_code(run_cli("gen --d 4 --count 2 --dist sphere --seed 1 --out " + out1)), 0);
    ASSERT_EQ(exit_code(run_cli("gen --d 4 --count 2 --dist sphere --seed 1 --out " + out2)), 0);
    EXPECT_EQ(fs::file_size(out1), 16u + 64u);
    EXPECT_EQ(slurp(out1), slurp(out2));
    const auto rows = jl::read_vectors_file(out1);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(jl::squared_norm(rows[0]), 1.0, 1e-12);
    fs::remove(out1);
    fs::remove(out2);
}

TEST(Cli, GenBinaryKDelegatesToHardInstance) {
    const std::string out = temp_path("genb.jlv");
    ASSERT_EQ(exit_code(run_cli("gen --d 6 --count 3 --dist binary-k --k 3 --seed 2 --out " + out)), 0);
    const auto rows = jl::read_vectors_file(out);
    for (const auto& r : rows) {
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(r[i], 1.0 / std::sqrt(3.0), 1e-12);
        for (int i = 3; i < 6; ++i) EXPECT_DOUBLE_EQ(r[i], 0.0);
    }
    fs::remove(out);
}

TEST(Cli, EmbedPreservesCountAndChecksDims) {
    const std::string in = temp_path("embed_in.jlv");
    const std::string out = temp_path("embed_out.jlv");
    ASSERT_EQ(exit_code(run_cli("gen --d 8 --count 5 --dist gaussian --seed 3 --out " + in)), 0);
    ASSERT_EQ(exit_code(run_cli("embed --transform rademacher --d 8 --m 4 --seed 1 --in " +
                                in + " --out " + out)), 0);
    const auto rows = jl::read_vectors_file(out);
    EXPECT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0].size(), 4u);
    // dimension mismatch between the file and --d exits 4
    EXPECT_EQ(exit_code(run_cli("embed --transform rademacher --d 9 --m 4 --seed 1 --in " +
                                in + " --out " + out)), 4);
    // unknown transform exits 2
    EXPECT_EQ(exit_code(run_cli("embed --transform nope --d 8 --m 4 --seed 1 --in " + in +
                                " --out " + out)), 2);
    fs::remove(in);
    fs::remove(out);
}

TEST(Cli, EmbedZeroVectorGivesZeroRow) {
    const std::string in = temp_path("zero_in.csv");
    const std::string out = temp_path("zero_out.csv");
    std::ofstream(in) << "0,0,0,0\n";
    ASSERT_EQ(exit_code(run_cli("embed --transform fjlt --d 4 --m 2 --seed 9 --format csv --in " +
                                in + " --out " + out)), 0);
    std::ifstream result(out);
    const auto rows = jl::read_vectors_csv(result);
    for (double v : rows[0]) EXPECT_DOUBLE_EQ(v, 0.0);
    fs::remove(in);
    fs::remove(out);
}

TEST(Cli, VerifyExitCodesAndJson) {
    const std::string json = temp_path("verify.json");
    EXPECT_EQ(exit_code(run_cli("verify --transform rademacher --d 64 --auto-m --eps 0.25 "
                                "--delta 0.05 --gen sphere --trials 2000 --seed 5 --json " +
                                json)), 0);
    const std::string text = slurp(json);
    auto j = nlohmann::json::parse(text);
    for (const char* key : {"kind", "d", "m", "eps", "delta", "trials", "failures",
                            "failure_rate", "ci95", "mean_sq_ratio", "seed"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["m"], 473);
    fs::remove(json);
    EXPECT_EQ(exit_code(run_cli("verify --transform rademacher --d 64 --m 1 --eps 0.25 "
                                "--delta 0.05 --gen sphere --trials 500 --seed 5")), 1);
}

TEST(Cli, SketchQueriesAndShardMerge) {
    const std::string s1 = temp_path("shard1.txt");
    const std::string s2 = temp_path("shard2.txt");
    const std::string whole = temp_path("whole.txt");
    std::ofstream(s1) << "#d=32 M=10\n3,5\n7,2\n";
    std::ofstream(s2) << "#d=32 M=10\n3,1\n9,-4\n";
    std::ofstream(whole) << "#d=32 M=10\n3,5\n7,2\n3,1\n9,-4\n";
    std::string out_merged, out_whole;
    ASSERT_EQ(exit_code(run_cli("sketch --kind cs --d 32 --eps 0.2 --delta 0.1 --seed 4 "
                                "--stream " + s1 + " --stream " + s2 + " --query f2",
                                &out_merged)), 0);
    ASSERT_EQ(exit_code(run_cli("sketch --kind cs --d 32 --eps 0.2 --delta 0.1 --seed 4 "
                                "--stream " + whole + " --query f2",
                                &out_whole)), 0);
    EXPECT_EQ(out_merged, out_whole);

    std::string point;
    ASSERT_EQ(exit_code(run_cli("sketch --kind ams --d 32 --eps 0.5 --delta 0.2 --seed 4 "
                                "--stream " + s1 + " --query point:3", &point)), 2);
    // ams has no point query; cs answers it exactly on a single-item stream
    const std::string single = temp_path("single.txt");
    std::ofstream(single) << "5,9\n";
    ASSERT_EQ(exit_code(run_cli("sketch --kind cs --d 32 --eps 0.5 --delta 0.2 --seed 4 "
                                "--stream " + single + " --query point:5", &point)), 0);
    EXPECT_EQ(std::stod(point), 9.0);
    std::string f2;
    ASSERT_EQ(exit_code(run_cli("sketch --kind ams --d 32 --eps 0.5 --delta 0.2 --seed 4 "
                                "--stream " + single + " --query f2", &f2)), 0);
    EXPECT_EQ(std::stod(f2), 81.0);

    std::string topk;
    const std::string inserts = temp_path("inserts.txt");
    std::ofstream(inserts) << "3,5\n7,2\n3,1\n9,4\n";  // insertion-only for topk
    ASSERT_EQ(exit_code(run_cli("sketch --kind cs --d 32 --eps 0.2 --delta 0.1 --seed 4 "
                                "--stream " + inserts + " --query topk:2", &topk)), 0);
    EXPECT_EQ(topk.rfind("3,", 0), 0u);  // index 3 leads with count 6
    fs::remove(inserts);

    const std::string bad = temp_path("bad.txt");
    std::ofstream(bad) << "oops\n";
    EXPECT_EQ(exit_code(run_cli("sketch --kind cs --d 32 --eps 0.2 --delta 0.1 --seed 4 "
                                "--stream " + bad + " --query f2")), 5);
    for (const auto& p : {s1, s2, whole, single, bad}) fs::remove(p);
}

TEST(Cli, KmeansIdentityReport) {
    const std::string in = temp_path("km.jlv");
    ASSERT_EQ(exit_code(run_cli("gen --d 6 --count 12 --dist gaussian --seed 8 --out " + in)), 0);
    std::string out;
    ASSERT_EQ(exit_code(run_cli("kmeans --k 3 --eps 0.3 --transform identity --seed 2 --in " +
                                in, &out)), 0);
    const auto j = nlohmann::json::parse(out);
    EXPECT_TRUE(j.contains("cost_low"));
    EXPECT_TRUE(j.contains("cost_lifted"));
    EXPECT_TRUE(j.contains("distances_preserved"));
    EXPECT_DOUBLE_EQ(j["cost_low"].get<double>(), j["cost_lifted"].get<double>());
    EXPECT_TRUE(j["distances_preserved"].get<bool>());

    // k = count clusters every point alone; both costs collapse to zero
    std::string out2;
    ASSERT_EQ(exit_code(run_cli("kmeans --k 12 --eps 0.3 --transform gaussian --seed 2 --in " +
                                in, &out2)), 0);
    const auto j2 = nlohmann::json::parse(out2);
    EXPECT_DOUBLE_EQ(j2["cost_low"].get<double>(), 0.0);
    EXPECT_DOUBLE_EQ(j2["cost_lifted"].get<double>(), 0.0);
    fs::remove(in);
}

TEST(Cli, BenchCsvShape) {
    std::string out;
    ASSERT_EQ(exit_code(run_cli("bench --kinds srht,toeplitz --d-list 256,512 --m 16 --reps 5",
                                &out)), 0);
    std::stringstream ss(out);
    std::string line;
    ASSERT_TRUE(std::getline(ss, line));
    EXPECT_EQ(line, "kind,d,m,median_ns");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(Cli, CsvFormatAndKindFlags) {
    const std::string in = temp_path("flags_in.csv");
    const std::string out = temp_path("flags_out.csv");
    ASSERT_EQ(exit_code(run_cli("gen --d 8 --count 3 --dist sphere --seed 6 --format csv --out " +
                                in)), 0);
    std::ifstream f(in);
    const auto rows = jl::read_vectors_csv(f);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NEAR(jl::squared_norm(rows[0]), 1.0, 1e-12);
    // block with explicit column sparsity; output dim pads m up to s | m
    ASSERT_EQ(exit_code(run_cli("embed --transform block --d 8 --m 10 --s 4 --seed 1 "
                                "--format csv --in " + in + " --out " + out)), 0);
    std::ifstream g(out);
    EXPECT_EQ(jl::read_vectors_csv(g)[0].size(), 12u);
    // achlioptas with full density q = 1
    ASSERT_EQ(exit_code(run_cli("embed --transform achlioptas --d 8 --m 4 --q 1.0 --seed 1 "
                                "--format csv --in " + in + " --out " + out)), 0);
    fs::remove(in);
    fs::remove(out);
}

TEST(Cli, VerifyHardInstanceGenerator) {
    std::string out;
    ASSERT_EQ(exit_code(run_cli("verify --transform fh --d 64 --m 512 --eps 0.2 --delta 0.05 "
                                "--gen fh-hard --k 2 --trials 500 --seed 3", &out)), 0);
    const auto j = nlohmann::json::parse(out);
    EXPECT_EQ(j["kind"], "fh");
    EXPECT_LE(j["failure_rate"].get<double>(), 0.05);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(exit_code(run_cli("gen --count 2")), 2);             // missing --d
    EXPECT_EQ(exit_code(run_cli("frobnicate")), 2);                // unknown command
    EXPECT_EQ(exit_code(run_cli("gen --d 4 --count 1 --dist bad --seed 1 --out /tmp/x")), 2);
}

TEST(Cli, IoErrorsExitThree) {
    EXPECT_EQ(exit_code(run_cli("embed --transform rademacher --d 4 --m 2 --seed 1 "
                                "--in /nonexistent/in.jlv --out /tmp/out.jlv")), 3);
}

}  // namespace
