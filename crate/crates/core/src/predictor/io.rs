//! Model files and training-corpus TSV.
//!
//! Model layout, little-endian: magic `TQAPRED\0`, version u32, dimension
//! u32, vocabulary size u32, each word as u32 length + UTF-8, the vectors as
//! f32 rows, then training metadata.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::{EmbeddingTable, PredictorModel, TrainingExample, TrainingMetadata};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TQAPRED\0";
const VERSION: u32 = 1;
const MAX_WORD_BYTES: u32 = 1 << 16;

fn write_f64s(w: &mut impl Write, xs: &[f64]) -> std::io::Result<()> {
    w.write_u32::<LE>(xs.len() as u32)?;
    xs.iter().try_for_each(|x| w.write_f64::<LE>(*x))
}

fn read_f64s(r: &mut impl Read) -> std::io::Result<Vec<f64>> {
    let n = r.read_u32::<LE>()?;
    (0..n).map(|_| r.read_f64::<LE>()).collect()
}

impl PredictorModel {
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let e = &self.embeddings;
        w.write_all(MAGIC)?;
        w.write_u32::<LE>(VERSION)?;
        w.write_u32::<LE>(e.dim as u32)?;
        w.write_u32::<LE>(e.vocab.len() as u32)?;
        for word in &e.vocab {
            w.write_u32::<LE>(word.len() as u32)?;
            w.write_all(word.as_bytes())?;
        }
        for v in &e.vectors {
            w.write_f32::<LE>(*v)?;
        }
        let m = &self.metadata;
        w.write_u32::<LE>(m.epochs)?;
        w.write_u64::<LE>(m.seed)?;
        w.write_u64::<LE>(m.split_seed)?;
        w.write_f64::<LE>(m.learning_rate)?;
        w.write_u32::<LE>(m.train_examples)?;
        w.write_u32::<LE>(m.heldout_examples)?;
        match m.heldout_accuracy {
            Some(a) => {
                w.write_u8(1)?;
                w.write_f64::<LE>(a)?;
            }
            None => w.write_u8(0)?,
        }
        write_f64s(w, &m.train_loss)?;
        write_f64s(w, &m.heldout_loss)?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let bad = |what: &str| Error::ModelFormat(what.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if &magic != MAGIC {
            return Err(bad("not a predictor model (bad magic)"));
        }
        let version = r.read_u32::<LE>()?;
        if version != VERSION {
            return Err(Error::ModelFormat(format!("unsupported version {version}")));
        }
        let dim = r.read_u32::<LE>()? as usize;
        let n = r.read_u32::<LE>()? as usize;
        let mut vocab = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let len = r.read_u32::<LE>()?;
            if len > MAX_WORD_BYTES {
                return Err(bad("word too long"));
            }
            let mut buf = vec![0u8; len as usize];
            r.read_exact(&mut buf)?;
            vocab.push(String::from_utf8(buf).map_err(|_| bad("word is not UTF-8"))?);
        }
        let mut vectors = vec![0f32; n * dim];
        r.read_f32_into::<LE>(&mut vectors)?;
        let epochs = r.read_u32::<LE>()?;
        let seed = r.read_u64::<LE>()?;
        let split_seed = r.read_u64::<LE>()?;
        let learning_rate = r.read_f64::<LE>()?;
        let train_examples = r.read_u32::<LE>()?;
        let heldout_examples = r.read_u32::<LE>()?;
        let heldout_accuracy = match r.read_u8()? {
            0 => None,
            _ => Some(r.read_f64::<LE>()?),
        };
        let train_loss = read_f64s(r)?;
        let heldout_loss = read_f64s(r)?;
        Ok(PredictorModel {
            embeddings: EmbeddingTable::new(dim, vocab, vectors)?,
            metadata: TrainingMetadata {
                epochs,
                seed,
                split_seed,
                learning_rate,
                train_examples,
                heldout_examples,
                heldout_accuracy,
                train_loss,
                heldout_loss,
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '|'], " ")
}

/// `terms<TAB>columns<TAB>correct-index`, with `|` between list items.
pub fn write_corpus_tsv(examples: &[TrainingExample], w: &mut impl Write) -> Result<()> {
    writeln!(w, "terms\tcolumns\tcorrect")?;
    for e in examples {
        let terms: Vec<String> = e.terms.iter().map(|t| clean(t)).collect();
        let cols: Vec<String> = e.columns.iter().map(|c| clean(c)).collect();
        writeln!(w, "{}\t{}\t{}", terms.join("|"), cols.join("|"), e.correct)?;
    }
    Ok(())
}

pub fn read_corpus_tsv(r: impl Read) -> Result<Vec<TrainingExample>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let bad = |reason: &str| Error::Config { name: "corpus".into(), line: i + 1, reason: reason.into() };
        let mut parts = line.split('\t');
        let (Some(terms), Some(cols), Some(correct)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad("expected three tab-separated fields"));
        };
        let split = |s: &str| s.split('|').map(str::to_string).filter(|x| !x.is_empty()).collect::<Vec<_>>();
        let columns = split(cols);
        let correct: usize = correct.trim().parse().map_err(|_| bad("bad correct index"))?;
        if correct >= columns.len() {
            return Err(bad("correct index out of range"));
        }
        out.push(TrainingExample::new(split(terms), columns, correct));
    }
    Ok(out)
}
