use std::fs::{self, OpenOptions};
use std::io::{Read, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use hve_core::group::{os_rng, seeded_rng};
use hve_core::{AttributeVector, Bls12_381, Bn254, GroupSuite, Mode, SchemeId, Slot};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::backend::{backend, delegate};
use crate::files::{
    append_record, blob_dir, create_new, fingerprint, new_header, plain_sidecar, Encoding, Index,
    IndexRecord, KeyFile, Meta, KIND_PK, KIND_SK, KIND_TOKEN,
};
use crate::spec::{build_pattern, encode_values, parse_attr, parse_attrs, parse_values};
use crate::{payload, usage, Cli, Command, CurveArg};
use crate::{DelegateArgs, EncryptArgs, KeygenArgs, SearchArgs, TokenArgs};

const MAX_SLOTS: usize = 1 << 16;

pub fn run(cli: Cli) -> Result<ExitCode> {
    let seed = cli.seed;
    match cli.command {
        Command::Keygen(a) => keygen(a, seed),
        Command::Encrypt(a) => encrypt(a, seed),
        Command::Token(a) => token(a, seed),
        Command::Delegate(a) => delegate_cmd(a, seed),
        Command::Search(a) => search(a),
    }
}

fn rng(seed: Option<u64>, offset: u64) -> ChaCha20Rng {
    match seed {
        Some(s) => seeded_rng(s.wrapping_add(offset)),
        None => os_rng(),
    }
}

fn keygen(a: KeygenArgs, seed: Option<u64>) -> Result<ExitCode> {
    let scheme = SchemeId::from(a.scheme);
    let encoding = a.encode.map(|family| Encoding {
        family,
        n: a.domain.unwrap_or(0) as usize,
        w: a.width.unwrap_or(0) as usize,
    });
    let l = match &encoding {
        Some(enc) => enc.slots().unwrap_or(usize::MAX),
        None => a.fields.unwrap_or(0) as usize,
    };
    if l > MAX_SLOTS {
        return Err(usage!(
            "{l} attribute slots exceeds the limit of {MAX_SLOTS}"
        ));
    }
    let mode = if a.symmetric {
        Mode::Symmetric
    } else {
        Mode::Asymmetric
    };
    if scheme == SchemeId::Asym1 && mode == Mode::Symmetric {
        return Err(usage!("asym1 requires the asymmetric group suite"));
    }
    let (suite, curve_name) = match a.curve {
        CurveArg::Bls12_381 => (GroupSuite::<Bls12_381>::new(mode).id(), "bls12-381"),
        CurveArg::Bn254 => (GroupSuite::<Bn254>::new(mode).id(), "bn254"),
    };
    let meta = Meta {
        suite,
        scheme,
        l,
        encoding,
    };

    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let pk_path = a.out_dir.join("pk.hve");
    let sk_path = a.out_dir.join("sk.hve");
    let mut pk_file = create_new(&pk_path, a.force)?;
    let mut sk_file = match create_new(&sk_path, a.force) {
        Ok(f) => f,
        Err(e) => {
            let _ = fs::remove_file(&pk_path);
            return Err(e);
        }
    };

    let keys = backend(suite, scheme)?.setup(&mut rng(seed, 0), l)?;
    pk_file.write_all(
        &KeyFile {
            meta,
            record: keys.pk,
        }
        .to_bytes(KIND_PK),
    )?;
    sk_file.write_all(
        &KeyFile {
            meta,
            record: keys.sk,
        }
        .to_bytes(KIND_SK),
    )?;

    let c = keys.pk_counts;
    let enc = encoding.map_or(String::new(), |e| {
        format!(" encoding={} n={} w={}", e.family, e.n, e.w)
    });
    println!(
        "{scheme} l={l}{enc} curve={curve_name} mode={} pk: {} G1 + {} G2 + {} GT elements",
        match mode {
            Mode::Asymmetric => "asymmetric",
            Mode::Symmetric => "symmetric",
        },
        c.g1,
        c.g2,
        c.gt
    );
    println!("{}", pk_path.display());
    println!("{}", sk_path.display());
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct PlainEntry<'a> {
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    attrs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<&'a [usize]>,
}

fn encrypt(a: EncryptArgs, seed: Option<u64>) -> Result<ExitCode> {
    let pk = KeyFile::load(&a.pk, KIND_PK)?;
    let meta = pk.meta;
    let (x, attrs, values) = match (&meta.encoding, &a.attrs, &a.values) {
        (None, Some(s), None) => {
            let attrs = parse_attrs(s)?;
            if attrs.len() != meta.l {
                return Err(usage!(
                    "expected {} attributes, got {}",
                    meta.l,
                    attrs.len()
                ));
            }
            let shown = attrs.iter().map(|v| v.to_string()).collect();
            (AttributeVector::new(attrs)?, Some(shown), None)
        }
        (Some(enc), None, Some(s)) => {
            let values = parse_values(s)?;
            (encode_values(enc, &values)?, None, Some(values))
        }
        (None, _, _) => return Err(usage!("this key pair takes --attrs")),
        (Some(_), _, _) => return Err(usage!("this key pair is encoded and takes --values")),
    };

    let payload = if a.payload.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        buf
    } else {
        fs::read(&a.payload).with_context(|| format!("reading {}", a.payload.display()))?
    };

    let scheme = backend(meta.suite, meta.scheme)?;
    let header = new_header(meta, &pk.record);
    let blobs = blob_dir(&a.index);
    let record = append_record(&a.index, &header, |index| {
        let mut rng = rng(seed, index.records.len() as u64 + 1);
        let sealed = payload::store(&mut rng, &payload, &blobs)?;
        let ct = scheme.encrypt(&mut rng, &pk.record, &x, &sealed)?;
        let id = match &a.id {
            Some(id) => id.clone(),
            None => hex::encode(&Sha256::digest(&ct)[..8]),
        };
        Ok(IndexRecord { id, ct })
    })?;

    if a.sidecar {
        let entry = PlainEntry {
            id: &record.id,
            attrs,
            values: values.as_deref(),
        };
        let path = plain_sidecar(&a.index);
        let mut line = serde_json::to_vec(&entry)?;
        line.push(b'\n');
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .and_then(|mut f| f.write_all(&line))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{}", record.id);
    Ok(ExitCode::SUCCESS)
}

fn token(a: TokenArgs, seed: Option<u64>) -> Result<ExitCode> {
    let sk = KeyFile::load(&a.sk, KIND_SK)?;
    let pk = KeyFile::load(&a.pk, KIND_PK)?;
    pk.meta.ensure_compatible(&sk.meta, "secret key")?;
    let meta = pk.meta;
    let pattern = build_pattern(&a.spec, meta.scheme, meta.l, meta.encoding.as_ref())?;
    let record = backend(meta.suite, meta.scheme)?.gen_token(
        &mut rng(seed, 0),
        &pk.record,
        &sk.record,
        &pattern,
    )?;
    KeyFile { meta, record }.save(&a.out, KIND_TOKEN)?;
    log::info!(
        "token with {} fixed and {} delegatable slots written to {}",
        pattern.fixed_indices().len(),
        pattern.delegatable_indices().len(),
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_fix(s: &str, l: usize) -> Result<(usize, Slot)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| usage!("--fix expects k=v or k=*, got {s:?}"))?;
    let k: usize = k
        .trim()
        .parse()
        .map_err(|_| usage!("bad field number in {s:?}"))?;
    if !(1..=l).contains(&k) {
        return Err(usage!("field {k} outside 1..={l}"));
    }
    let slot = match v.trim() {
        "*" => Slot::Wildcard,
        v => Slot::Value(parse_attr(v)?),
    };
    Ok((k - 1, slot))
}

fn delegate_cmd(a: DelegateArgs, seed: Option<u64>) -> Result<ExitCode> {
    let tk = KeyFile::load(&a.token, KIND_TOKEN)?;
    let pk = KeyFile::load(&a.pk, KIND_PK)?;
    pk.meta.ensure_compatible(&tk.meta, "token")?;
    if tk.meta.scheme != SchemeId::Dhve3 {
        return Err(usage!(
            "delegation needs a dhve3 token, got {}",
            tk.meta.scheme
        ));
    }
    let mut rng = rng(seed, 0);
    let mut record = tk.record;
    for fix in &a.fix {
        let (k, slot) = parse_fix(fix, tk.meta.l)?;
        record = delegate(&mut rng, tk.meta.suite, &pk.record, &record, k, &slot)?;
    }
    KeyFile {
        meta: tk.meta,
        record,
    }
    .save(&a.out, KIND_TOKEN)?;
    Ok(ExitCode::SUCCESS)
}

fn search(a: SearchArgs) -> Result<ExitCode> {
    let index = Index::load(&a.index)?;
    let tk = KeyFile::load(&a.token, KIND_TOKEN)?;
    let pk = KeyFile::load(&a.pk, KIND_PK)?;
    let meta = index.header.meta;
    meta.ensure_compatible(&tk.meta, "token")?;
    meta.ensure_compatible(&pk.meta, "public key")?;
    if fingerprint(&pk.record) != index.header.pk_fingerprint {
        log::warn!(
            "public key differs from the one {} was built with",
            a.index.display()
        );
    }

    let searcher = backend(meta.suite, meta.scheme)?.searcher(&pk.record, &tk.record)?;
    let results = index
        .records
        .par_iter()
        .map(|r| {
            searcher
                .query(&r.ct)
                .with_context(|| format!("record {}", r.id))
        })
        .collect::<Result<Vec<_>>>()?;

    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let blobs = blob_dir(&a.index);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut matches = 0usize;
    let mut pairings = 0u64;
    for (record, (result, count)) in index.records.iter().zip(results) {
        pairings += count;
        let Some(sealed) = result.payload() else {
            continue;
        };
        matches += 1;
        match &a.out_dir {
            Some(dir) => {
                let data = payload::load(sealed, &blobs)
                    .with_context(|| format!("record {}", record.id))?;
                let path = dir.join(&record.id);
                fs::write(&path, data).with_context(|| format!("writing {}", path.display()))?;
                writeln!(out, "{}\t{}", record.id, path.display())?;
            }
            None => writeln!(out, "{}", record.id)?,
        }
    }
    out.flush()?;
    if a.raw_count {
        eprintln!(
            "records={} matches={matches} pairings={pairings}",
            index.records.len()
        );
    }
    if a.fail_empty && matches == 0 {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
