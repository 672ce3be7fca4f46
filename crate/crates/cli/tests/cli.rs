use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hve_core::group::seeded_rng;
use hve_core::wire::{container_len, open_container, TlvReader};
use hve_core::{Bls12_381, CountElements, GroupSuite, HveScheme, Ll, Record};
use rand::Rng;
use tempfile::TempDir;

struct Env {
    dir: TempDir,
}

impl Env {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_hve"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn code(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }

    fn keygen(&self, dir: &str, extra: &[&str]) {
        let mut args = vec!["--seed", "7", "keygen", "--out-dir", dir];
        args.extend_from_slice(extra);
        self.ok(&args);
    }

    fn write(&self, name: &str, data: &[u8]) -> String {
        fs::write(self.path(name), data).unwrap();
        name.to_string()
    }

    fn search(&self, index: &str, token: &str, pk: &str) -> BTreeSet<String> {
        self.ok(&["search", "--index", index, "--token", token, "--pk", pk])
            .lines()
            .map(str::to_string)
            .collect()
    }
}

/// Returns `(l, inner record)` from a key or token file.
fn key_file(path: &Path) -> (usize, Vec<u8>) {
    let bytes = fs::read(path).unwrap();
    let (_, body) = open_container(&bytes).unwrap();
    let mut r = TlvReader::new(body);
    r.take(1).unwrap();
    let l = r.u32(2).unwrap() as usize;
    if r.peek_tag() == Some(3) {
        r.nested(3).unwrap();
    }
    (l, r.take(4).unwrap().to_vec())
}

/// Counts complete records in an index file.
fn count_records(path: &Path) -> usize {
    let bytes = fs::read(path).unwrap();
    let mut pos = container_len(&bytes).unwrap();
    let mut n = 0;
    while pos < bytes.len() {
        let len = u32::from_le_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize;
        open_container(&bytes[pos + 4..pos + 4 + len]).unwrap();
        pos += 4 + len;
        n += 1;
    }
    n
}

fn plain_entries(path: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn keygen_writes_decodable_keys_with_scheme_counts() {
    let env = Env::new();
    let out = env.ok(&[
        "keygen",
        "--scheme",
        "ll3",
        "--fields",
        "4",
        "--out-dir",
        "k",
    ]);
    assert!(out.starts_with("LL3 l=4"), "{out}");

    let (l, record) = key_file(&env.path("k/pk.hve"));
    assert_eq!(l, 4);
    let suite = GroupSuite::<Bls12_381>::asymmetric();
    let pk = <Ll as HveScheme<Bls12_381>>::PublicKey::from_bytes(&record, suite.id()).unwrap();
    let (fresh, _) = Ll::setup(&mut seeded_rng(1), &suite, 4).unwrap();
    assert_eq!(pk.element_counts(), fresh.element_counts());
    assert_eq!(pk.element_counts().g1, 45);

    assert_eq!(
        env.code(&[
            "keygen",
            "--scheme",
            "ll3",
            "--fields",
            "4",
            "--out-dir",
            "k"
        ]),
        1,
        "refuses to overwrite"
    );
    env.ok(&[
        "keygen",
        "--scheme",
        "ll3",
        "--fields",
        "4",
        "--out-dir",
        "k",
        "--force",
    ]);
}

#[test]
fn usage_errors_exit_with_1() {
    let env = Env::new();
    for args in [
        &[
            "keygen",
            "--scheme",
            "ll3",
            "--fields",
            "0",
            "--out-dir",
            "k",
        ][..],
        &["keygen", "--scheme", "ll3", "--out-dir", "k"],
        &[
            "keygen",
            "--scheme",
            "nope",
            "--fields",
            "2",
            "--out-dir",
            "k",
        ],
        &[
            "keygen",
            "--scheme",
            "asym1",
            "--fields",
            "2",
            "--symmetric",
            "--out-dir",
            "k",
        ],
        &[
            "keygen",
            "--scheme",
            "bw2",
            "--encode",
            "cmp",
            "--domain",
            "4",
            "--out-dir",
            "k",
        ],
        &["search"],
    ] {
        assert_eq!(env.code(args), 1, "{args:?}");
    }
    assert_eq!(env.code(&["--help"]), 0);
}

#[test]
fn encoded_keygen_records_l() {
    let env = Env::new();
    let out = env.ok(&[
        "keygen",
        "--scheme",
        "bw2",
        "--encode",
        "cmp",
        "--domain",
        "10",
        "--width",
        "2",
        "--out-dir",
        "k",
    ]);
    assert!(out.contains("l=20"), "{out}");
    assert_eq!(key_file(&env.path("k/pk.hve")).0, 20);

    env.ok(&[
        "keygen",
        "--scheme",
        "bw2",
        "--encode",
        "range",
        "--domain",
        "3",
        "--width",
        "2",
        "--out-dir",
        "r",
    ]);
    assert_eq!(key_file(&env.path("r/pk.hve")).0, 12);

    let p = env.write("p", b"x");
    for values in ["0,3", "11,3", "3", "a,3"] {
        assert_eq!(
            env.code(&[
                "encrypt",
                "--pk",
                "k/pk.hve",
                "--index",
                "i",
                "--values",
                values,
                "--payload",
                &p
            ]),
            1,
            "{values}"
        );
    }
    assert_eq!(
        env.code(&[
            "encrypt",
            "--pk",
            "k/pk.hve",
            "--index",
            "i",
            "--attrs",
            "1,2",
            "--payload",
            &p
        ]),
        1
    );
}

#[test]
fn hundred_records_decode_and_match_wildcards() {
    let env = Env::new();
    env.keygen("k", &["--scheme", "ll3", "--fields", "2"]);
    let p = env.write("p", b"payload");
    let mut ids = BTreeSet::new();
    for i in 0..100 {
        let attrs = if i % 2 == 0 {
            format!("{i},even")
        } else {
            format!("name{i},{}", i % 7)
        };
        let id = env.ok(&[
            "--seed",
            "3",
            "encrypt",
            "--pk",
            "k/pk.hve",
            "--index",
            "idx",
            "--attrs",
            &attrs,
            "--payload",
            &p,
        ]);
        ids.insert(id.trim().to_string());
    }
    assert_eq!(ids.len(), 100);
    assert_eq!(count_records(&env.path("idx")), 100);

    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", "k/pk.hve", "--spec", "*,*", "--out", "all",
    ]);
    assert_eq!(env.search("idx", "all", "k/pk.hve"), ids);

    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", "k/pk.hve", "--spec", "*,=even", "--out", "even",
    ]);
    assert_eq!(env.search("idx", "even", "k/pk.hve").len(), 50);

    let out = env.run(&[
        "search",
        "--index",
        "idx",
        "--token",
        "even",
        "--pk",
        "k/pk.hve",
        "--raw-count",
    ]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("pairings=1200"), "{stderr}");
}

#[test]
fn other_keypair_finds_nothing() {
    let env = Env::new();
    env.keygen("a", &["--scheme", "asym1", "--fields", "3"]);
    env.ok(&[
        "--seed",
        "8",
        "keygen",
        "--scheme",
        "asym1",
        "--fields",
        "3",
        "--out-dir",
        "b",
    ]);
    let p = env.write("p", b"secret");
    for i in 0..50 {
        env.ok(&[
            "encrypt",
            "--pk",
            "a/pk.hve",
            "--index",
            "idx",
            "--attrs",
            &format!("{},1,2", i % 3),
            "--payload",
            &p,
        ]);
    }
    env.ok(&[
        "token", "--sk", "b/sk.hve", "--pk", "b/pk.hve", "--spec", "*,*,*", "--out", "tb",
    ]);
    assert!(env.search("idx", "tb", "b/pk.hve").is_empty());
    assert_eq!(
        env.code(&[
            "search",
            "--index",
            "idx",
            "--token",
            "tb",
            "--pk",
            "b/pk.hve",
            "--fail-empty"
        ]),
        3
    );
    env.ok(&[
        "token", "--sk", "a/sk.hve", "--pk", "a/pk.hve", "--spec", "*,*,*", "--out", "ta",
    ]);
    assert_eq!(env.search("idx", "ta", "a/pk.hve").len(), 50);

    assert_eq!(
        env.code(&[
            "encrypt",
            "--pk",
            "b/pk.hve",
            "--index",
            "idx",
            "--attrs",
            "1,1,2",
            "--payload",
            &p
        ]),
        1,
        "index is bound to its key pair"
    );
}

#[test]
fn delegation_matches_fresh_token() {
    let env = Env::new();
    env.keygen("k", &["--scheme", "dhve3", "--fields", "3"]);
    let p = env.write("p", b"d");
    for i in 0..12 {
        env.ok(&[
            "encrypt",
            "--pk",
            "k/pk.hve",
            "--index",
            "idx",
            "--attrs",
            &format!("{},{},{}", i % 2, i % 3, i % 4),
            "--payload",
            &p,
        ]);
    }
    let pk = "k/pk.hve";
    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", pk, "--spec", "?,?,=2", "--out", "root",
    ]);
    env.ok(&[
        "delegate", "--token", "root", "--pk", pk, "--fix", "1=0", "--out", "d1",
    ]);
    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", pk, "--spec", "=0,?,=2", "--out", "f1",
    ]);
    assert_eq!(env.search("idx", "d1", pk), env.search("idx", "f1", pk));

    env.ok(&[
        "delegate", "--token", "d1", "--pk", pk, "--fix", "2=*", "--out", "d2",
    ]);
    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", pk, "--spec", "=0,*,=2", "--out", "f2",
    ]);
    let got = env.search("idx", "d2", pk);
    assert_eq!(got, env.search("idx", "f2", pk));
    assert_eq!(got.len(), 3);

    env.ok(&[
        "delegate", "--token", "root", "--pk", pk, "--fix", "2=2", "--fix", "1=0", "--out", "d3",
    ]);
    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", pk, "--spec", "=0,=2,=2", "--out", "f3",
    ]);
    let got = env.search("idx", "d3", pk);
    assert_eq!(got, env.search("idx", "f3", pk));
    assert_eq!(got.len(), 1);

    for fix in ["3=1", "4=1", "x=1", "1"] {
        assert_eq!(
            env.code(&["delegate", "--token", "root", "--pk", pk, "--fix", fix, "--out", "bad"]),
            1,
            "{fix}"
        );
    }

    env.keygen("ll", &["--scheme", "ll3", "--fields", "3"]);
    env.ok(&[
        "token",
        "--sk",
        "ll/sk.hve",
        "--pk",
        "ll/pk.hve",
        "--spec",
        "*,*,*",
        "--out",
        "lt",
    ]);
    assert_eq!(
        env.code(&[
            "delegate",
            "--token",
            "lt",
            "--pk",
            "ll/pk.hve",
            "--fix",
            "1=1",
            "--out",
            "bad"
        ]),
        1
    );
    assert_eq!(
        env.code(&[
            "token",
            "--sk",
            "ll/sk.hve",
            "--pk",
            "ll/pk.hve",
            "--spec",
            "?,*,*",
            "--out",
            "bad"
        ]),
        1
    );
}

type Oracle = fn(&[usize]) -> bool;

/// Per family: keygen flags, and specs with their plain meaning, over n=4, w=2.
fn family_cases(family: &str) -> (Vec<&'static str>, Vec<(&'static str, Oracle)>) {
    match family {
        "eq" => (
            vec!["--fields", "2"],
            vec![
                ("=1,*", |v| v[0] == 1),
                ("=2,=3", |v| v == [2, 3]),
                ("*,*", |_| true),
            ],
        ),
        "cmp" => (
            vec!["--encode", "cmp", "--domain", "4", "--width", "2"],
            vec![
                ("<=2,*", |v| v[0] <= 2),
                ("<=3,<=1", |v| v[0] <= 3 && v[1] <= 1),
                ("*,<=4", |_| true),
            ],
        ),
        "range" => (
            vec!["--encode", "range", "--domain", "4", "--width", "2"],
            vec![
                ("[2,3],*", |v| (2..=3).contains(&v[0])),
                (">=3,<=2", |v| v[0] >= 3 && v[1] <= 2),
                ("=4,[1,4]", |v| v[0] == 4),
            ],
        ),
        "subset" => (
            vec!["--encode", "subset", "--domain", "4", "--width", "2"],
            vec![
                ("in{1,3},*", |v| v[0] == 1 || v[0] == 3),
                ("=2,in{2,4}", |v| v[0] == 2 && v[1] % 2 == 0),
                ("in{},*", |_| false),
            ],
        ),
        _ => unreachable!(),
    }
}

fn values_of(entry: &serde_json::Value) -> Vec<usize> {
    if let Some(v) = entry.get("values") {
        return v
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as usize)
            .collect();
    }
    entry["attrs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn search_reproduces_plain_predicates_for_every_scheme_and_family() {
    let mut rng = seeded_rng(5);
    for scheme in ["bw2", "ll3", "dhve3", "asym1"] {
        for family in ["eq", "cmp", "range", "subset"] {
            let env = Env::new();
            let (flags, specs) = family_cases(family);
            let mut args = vec!["--scheme", scheme];
            args.extend(flags);
            env.keygen("k", &args);
            let p = env.write("p", b"rec");
            let flag = if family == "eq" {
                "--attrs"
            } else {
                "--values"
            };
            for _ in 0..10 {
                let v = format!("{},{}", rng.gen_range(1..=4), rng.gen_range(1..=4));
                env.ok(&[
                    "encrypt",
                    "--pk",
                    "k/pk.hve",
                    "--index",
                    "idx",
                    flag,
                    &v,
                    "--payload",
                    &p,
                    "--sidecar",
                ]);
            }
            let entries = plain_entries(&env.path("idx.plain.jsonl"));
            for (spec, oracle) in specs {
                env.ok(&[
                    "token", "--sk", "k/sk.hve", "--pk", "k/pk.hve", "--spec", spec, "--out", "t",
                ]);
                let expected: BTreeSet<String> = entries
                    .iter()
                    .filter(|e| oracle(&values_of(e)))
                    .map(|e| e["id"].as_str().unwrap().to_string())
                    .collect();
                assert_eq!(
                    env.search("idx", "t", "k/pk.hve"),
                    expected,
                    "{scheme} {family} {spec}"
                );
            }
        }
    }
}

#[test]
fn payloads_inline_and_in_blobs() {
    let env = Env::new();
    env.keygen(
        "k",
        &["--scheme", "bw2", "--fields", "1", "--curve", "bn254"],
    );
    let small = vec![3u8; 1000];
    let big: Vec<u8> = (0..200_000u32).map(|i| (i % 251) as u8).collect();
    env.write("small", &small);
    env.write("big", &big);
    env.ok(&[
        "encrypt",
        "--pk",
        "k/pk.hve",
        "--index",
        "idx",
        "--attrs",
        "a",
        "--payload",
        "small",
        "--id",
        "s",
    ]);
    env.ok(&[
        "encrypt",
        "--pk",
        "k/pk.hve",
        "--index",
        "idx",
        "--attrs",
        "a",
        "--payload",
        "big",
        "--id",
        "b",
    ]);
    assert_eq!(fs::read_dir(env.path("idx.blobs")).unwrap().count(), 1);
    assert!(fs::metadata(env.path("idx")).unwrap().len() < 10_000);

    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", "k/pk.hve", "--spec", "=a", "--out", "t",
    ]);
    let out = env.ok(&[
        "search",
        "--index",
        "idx",
        "--token",
        "t",
        "--pk",
        "k/pk.hve",
        "--out-dir",
        "got",
    ]);
    assert_eq!(out.lines().count(), 2);
    assert_eq!(fs::read(env.path("got/s")).unwrap(), small);
    assert_eq!(fs::read(env.path("got/b")).unwrap(), big);

    assert_eq!(
        env.code(&[
            "encrypt",
            "--pk",
            "k/pk.hve",
            "--index",
            "idx",
            "--attrs",
            "a",
            "--payload",
            "small",
            "--id",
            "s"
        ]),
        1,
        "duplicate id"
    );
    assert_eq!(
        env.code(&[
            "encrypt",
            "--pk",
            "k/pk.hve",
            "--index",
            "idx",
            "--attrs",
            "a",
            "--payload",
            "small",
            "--id",
            "../x"
        ]),
        1
    );

    for blob in fs::read_dir(env.path("idx.blobs")).unwrap() {
        let path = blob.unwrap().path();
        let mut data = fs::read(&path).unwrap();
        data[10] ^= 1;
        fs::write(&path, data).unwrap();
    }
    assert_eq!(
        env.code(&[
            "search",
            "--index",
            "idx",
            "--token",
            "t",
            "--pk",
            "k/pk.hve",
            "--out-dir",
            "got2"
        ]),
        2
    );
}

#[test]
fn truncated_tail_is_skipped_and_repaired() {
    let env = Env::new();
    env.keygen("k", &["--scheme", "ll3", "--fields", "1"]);
    let p = env.write("p", b"x");
    for id in ["r1", "r2", "r3"] {
        env.ok(&[
            "encrypt",
            "--pk",
            "k/pk.hve",
            "--index",
            "idx",
            "--attrs",
            "1",
            "--payload",
            &p,
            "--id",
            id,
        ]);
    }
    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", "k/pk.hve", "--spec", "*", "--out", "t",
    ]);

    let idx = env.path("idx");
    let full = fs::read(&idx).unwrap();
    fs::write(&idx, &full[..full.len() - 30]).unwrap();
    let out = env.run(&[
        "search", "--index", "idx", "--token", "t", "--pk", "k/pk.hve",
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "r1\nr2\n");
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("incomplete final record"));

    env.ok(&[
        "encrypt",
        "--pk",
        "k/pk.hve",
        "--index",
        "idx",
        "--attrs",
        "1",
        "--payload",
        &p,
        "--id",
        "r4",
    ]);
    assert_eq!(count_records(&idx), 3);
    assert_eq!(
        env.search("idx", "t", "k/pk.hve"),
        ["r1", "r2", "r4"].map(String::from).into()
    );

    let mut bytes = fs::read(&idx).unwrap();
    let start = container_len(&bytes).unwrap();
    bytes[start + 30] ^= 0xff;
    fs::write(&idx, bytes).unwrap();
    assert_eq!(
        env.code(&["search", "--index", "idx", "--token", "t", "--pk", "k/pk.hve"]),
        2
    );
}

#[test]
fn mismatched_files_are_rejected() {
    let env = Env::new();
    env.keygen("a", &["--scheme", "ll3", "--fields", "2"]);
    env.keygen("b", &["--scheme", "bw2", "--fields", "2"]);
    let p = env.write("p", b"x");
    env.ok(&[
        "encrypt",
        "--pk",
        "a/pk.hve",
        "--index",
        "idx",
        "--attrs",
        "1,2",
        "--payload",
        &p,
    ]);
    env.ok(&[
        "token", "--sk", "b/sk.hve", "--pk", "b/pk.hve", "--spec", "*,*", "--out", "tb",
    ]);

    assert_eq!(
        env.code(&["search", "--index", "idx", "--token", "tb", "--pk", "a/pk.hve"]),
        1
    );
    assert_eq!(
        env.code(&["token", "--sk", "a/pk.hve", "--pk", "a/pk.hve", "--spec", "*,*", "--out", "x"]),
        1
    );
    assert_eq!(
        env.code(&["token", "--sk", "b/sk.hve", "--pk", "a/pk.hve", "--spec", "*,*", "--out", "x"]),
        1
    );
    assert_eq!(
        env.code(&[
            "encrypt",
            "--pk",
            "a/pk.hve",
            "--index",
            "idx",
            "--attrs",
            "1",
            "--payload",
            &p
        ]),
        1
    );

    let mut pk = fs::read(env.path("a/pk.hve")).unwrap();
    pk[40] ^= 1;
    env.write("corrupt", &pk);
    assert_eq!(
        env.code(&[
            "encrypt",
            "--pk",
            "corrupt",
            "--index",
            "idx",
            "--attrs",
            "1,2",
            "--payload",
            &p
        ]),
        2
    );
    assert_eq!(
        env.code(&["search", "--index", "missing", "--token", "tb", "--pk", "b/pk.hve"]),
        2
    );
}

#[test]
fn symmetric_suite_end_to_end() {
    let env = Env::new();
    env.keygen("k", &["--scheme", "bw2", "--fields", "2", "--symmetric"]);
    let p = env.write("p", b"x");
    env.ok(&[
        "encrypt",
        "--pk",
        "k/pk.hve",
        "--index",
        "idx",
        "--attrs",
        "1,2",
        "--payload",
        &p,
        "--id",
        "hit",
    ]);
    env.ok(&[
        "encrypt",
        "--pk",
        "k/pk.hve",
        "--index",
        "idx",
        "--attrs",
        "2,2",
        "--payload",
        &p,
        "--id",
        "miss",
    ]);
    env.ok(&[
        "token", "--sk", "k/sk.hve", "--pk", "k/pk.hve", "--spec", "=1,*", "--out", "t",
    ]);
    assert_eq!(
        env.search("idx", "t", "k/pk.hve"),
        ["hit".to_string()].into()
    );
}
