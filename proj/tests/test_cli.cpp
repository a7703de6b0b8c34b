#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, bool with_stderr = false) {
    const std::string cmd = std::string(ABCT_CLI_PATH) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    char buf[4096];
    while (std::size_t k = fread(buf, 1, sizeof buf, p)) out.append(buf, k);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("abct_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

bool has_line(const std::string& text, const std::string& line) {
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (l == line) return true;
    return false;
}

}  // namespace

TEST_CASE("build, check and eval round trip") {
    TempDir d;
    const std::string golden = d / "p.tbl", hidden = d / "r.tbl";
    REQUIRE(run("build --modulus 2 --layout blocked --seed 1 -o " + golden).code == 0);
    REQUIRE(run("build --modulus 2 --layout blocked --seed 1 --redact -o " + hidden).code == 0);

    const Run c = run("check " + golden);
    CHECK(c.code == 0);
    CHECK(has_line(c.out, "PASS"));
    const Run blind = run("check " + hidden, true);
    CHECK(blind.code == 0);
    CHECK(has_line(blind.out, "no codebook: homomorphism not checked"));
    CHECK(run("check " + hidden + " --codebook " + golden).code == 0);

    CHECK(run("eval " + golden + " --expr '(x:A + y:B)' --bind x=1,y=1").out == "5 (0:C)\n");
    CHECK(run("eval " + hidden + " --expr '(x:A + y:B)' --bind x=2,y=4 --cipher").out == "5\n");
    CHECK(run("eval " + golden + " --expr '(x:A + y:B)' --bind x=1").code == 2);
}

TEST_CASE("check fails on a tampered table") {
    TempDir d;
    const std::string golden = d / "p.tbl";
    REQUIRE(run("build --modulus 2 --layout blocked --seed 1 -o " + golden).code == 0);
    std::ifstream in(golden);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    // first row of the add table: ADD(1,3) must be 5
    const auto at = text.find("op add\n") + 7;
    const auto eol = text.find('\n', at);
    std::istringstream row(text.substr(at, eol - at));
    std::vector<std::string> cells{std::istream_iterator<std::string>(row), {}};
    REQUIRE(cells[2] == "5");
    cells[2] = "6";
    std::string joined;
    for (std::size_t i = 0; i < cells.size(); ++i) joined += (i ? " " : "") + cells[i];
    text.replace(at, eol - at, joined);
    const std::string bad = d / "bad.tbl";
    std::ofstream(bad) << text;

    const Run r = run("check " + bad);
    CHECK(r.code == 1);
    CHECK(has_line(r.out, "FAIL"));
    const Run j = run("check " + bad + " --json");
    CHECK(j.code == 1);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["homomorphism"]["violations"].size() == 1);
}

TEST_CASE("usage errors and guards") {
    TempDir d;
    CHECK(run("").code == 2);
    CHECK(run("bogus").code == 2);
    CHECK(run("build --modulus 0 -o " + (d / "z.tbl")).code == 2);
    CHECK(run("build --modulus 2 --scheme nope -o " + (d / "z.tbl")).code == 2);
    CHECK(run("check " + (d / "missing.tbl")).code == 2);
    std::ofstream(d / "junk.tbl") << "ABCTBL 9\n";
    CHECK(run("check " + (d / "junk.tbl")).code == 2);
    CHECK(run("typecheck --expr '(x:A * y:Q)'").code == 2);

    CHECK(run("build --modulus 100000 -o " + (d / "big.tbl")).code == 3);
    CHECK(run("search embeddings --modulus 2 --size 12 --pairs-overlap").code == 3);
    CHECK(run("lemma1 --max-leaves 9").code == 3);
}

TEST_CASE("typecheck") {
    const Run a = run("typecheck --expr '(x:A * y:B)'");
    CHECK(a.code == 0);
    CHECK(a.out == "C +k\n");
    const Run b = run("typecheck --expr '(y:B * x:A)'");
    CHECK(b.code == 1);
    CHECK(b.out == "ILL_TYPED -k\n");
    CHECK(run("typecheck --expr '((x:A * y:B) * x:A)'").out == "B +j\n");
    CHECK(run("typecheck --expr '(y:B * x:A)' --scheme ab").out.substr(0, 2) == "B ");
}

TEST_CASE("attack") {
    TempDir d;
    const std::string golden = d / "p.tbl", hidden = d / "r.tbl";
    REQUIRE(run("build --modulus 2 --layout blocked --seed 1 -o " + golden).code == 0);
    REQUIRE(run("build --modulus 2 --layout blocked --seed 1 --redact -o " + hidden).code == 0);
    CHECK(run("attack " + hidden).code == 2);
    const Run r = run("attack " + hidden + " --codebook " + golden);
    CHECK(r.code == 0);
    CHECK(r.out.find("DOUBLING UNRELIABLE") != std::string::npos);
    CHECK(r.out.find("LAGRANGE NOT_APPLICABLE") != std::string::npos);
    const auto doc = nlohmann::json::parse(run("attack " + golden + " --suite SELF_DIV --json").out);
    CHECK(doc.dump().find("UNRELIABLE") != std::string::npos);

    const std::string pl = d / "plain.tbl";
    REQUIRE(run("build --modulus 16 --scheme plain --fill raw --seed 2 -o " + pl).code == 0);
    const Run p = run("attack " + pl + " --suite DOUBLING");
    CHECK(p.out.find("DOUBLING RELIABLE") != std::string::npos);
}

TEST_CASE("searches") {
    const Run c = run("search embeddings --modulus 2 --size 6");
    CHECK(c.out.find("candidates 720") != std::string::npos);
    const auto pairs = nlohmann::json::parse(run("search embeddings --modulus 2 --size 6 --pairs-overlap --json").out);
    CHECK(pairs["candidates"] == 720);
    CHECK(pairs["overlapping_embedding_pairs"] == 0);
    const auto clique = nlohmann::json::parse(run("search embeddings --modulus 2 --size 6 --max-clique --json").out);
    CHECK(clique["max_size"] == 2);

    const Run e = run("search expr");
    CHECK(e.code == 0);
    CHECK(e.out.find("constant-valued typed expression: (((x:A + y:B) * x:A) * (x:A * y:B))") != std::string::npos);
    const Run l = run("lemma1 --max-leaves 4");
    CHECK(l.code == 0);
    CHECK(has_line(l.out, "HOLDS"));
}

TEST_CASE("dual build and embeddings in a file") {
    TempDir d;
    const std::string dual = d / "d.tbl", second = d / "s.tbl";
    REQUIRE(run("build --modulus 2 --layout blocked --dual 5 --seed 3 -o " + dual + " --secondary " + second).code == 0);
    CHECK(run("check " + dual).code == 0);
    CHECK(run("check " + dual + " --codebook " + second).code == 0);
    const auto in = nlohmann::json::parse(run("search embeddings --modulus 2 --in " + dual + " --json").out);
    CHECK(in["embeddings"].size() == 2);
}
