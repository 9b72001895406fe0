use capstream_core::metrics::{
    friedman_test, quis_score, rm_anova, rtlx_score, sus_score, wilcoxon_signed_rank, RankMatrix,
};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use crate::exit::{fail, metrics_failure, CliResult, INPUT};
use crate::io::read_input;
use crate::tables::{parse_table, Table};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Questionnaire {
    Sus,
    Rtlx,
    Quis,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub questionnaire: Questionnaire,
    /// CSV with one respondent per row; `-` for stdin
    #[arg(long, default_value = "-")]
    pub input: String,
}

/// Prints `row,score` per respondent, then `mean,<value>`.
pub fn score(args: &ScoreArgs) -> CliResult {
    let table = parse_table(&read_input(&args.input)?)?;
    let scorer = match args.questionnaire {
        Questionnaire::Sus => sus_score,
        Questionnaire::Rtlx => rtlx_score,
        Questionnaire::Quis => quis_score,
    };
    let mut scores = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let s = scorer(row).map_err(|e| fail(INPUT, format!("respondent {}: {e}", i + 1)))?;
        scores.push(s);
    }
    println!("row,score");
    for (i, s) in scores.iter().enumerate() {
        println!("{},{s}", i + 1);
    }
    println!("mean,{}", scores.iter().sum::<f64>() / scores.len() as f64);
    Ok(())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StatTest {
    Friedman,
    Wilcoxon,
    Anova,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub test: StatTest,
    /// CSV: header row of condition names, one row per subject; `-` for stdin
    #[arg(long, default_value = "-")]
    pub input: String,
    /// Two condition names to compare (wilcoxon only; defaults to the only two columns)
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
}

/// Prints the test result as one JSON object.
pub fn stats(args: &StatsArgs) -> CliResult {
    let table = parse_table(&read_input(&args.input)?)?;
    let result = run_stats(args.test, &table, args.columns.as_deref())?;
    println!("{result}");
    Ok(())
}

pub fn run_stats(test: StatTest, table: &Table, columns: Option<&[String]>) -> CliResult<Value> {
    let k = table.rows[0].len();
    let names: Vec<String> = table.header.clone().unwrap_or_else(|| (1..=k).map(|i| format!("c{i}")).collect());
    if names.len() != k {
        return Err(fail(INPUT, format!("header has {} names for {k} columns", names.len())));
    }
    let mut out = match test {
        StatTest::Friedman => {
            let m = RankMatrix::new(table.rows.clone()).map_err(metrics_failure)?;
            let mut v = serde_json::to_value(friedman_test(&m)).expect("serializable");
            v["rank_sums"] = json!(m.rank_sums());
            v["conditions"] = json!(names);
            v
        }
        StatTest::Anova => {
            let m = RankMatrix::new(table.rows.clone()).map_err(metrics_failure)?;
            let r = rm_anova(&m).map_err(metrics_failure)?;
            let mut v = serde_json::to_value(&r).expect("serializable");
            for (pv, pt) in v["pairwise"].as_array_mut().expect("array").iter_mut().zip(&r.pairwise) {
                pv["a"] = json!(names[pt.a]);
                pv["b"] = json!(names[pt.b]);
            }
            v["conditions"] = json!(names);
            v
        }
        StatTest::Wilcoxon => {
            let (a, b) = match columns {
                Some([x, y]) => (position(&names, x)?, position(&names, y)?),
                Some(_) => return Err(fail(INPUT, "--columns takes exactly two names")),
                None if k == 2 => (0, 1),
                None => return Err(fail(INPUT, format!("{k} columns; choose two with --columns"))),
            };
            if table.rows.iter().any(|r| r.len() != k) {
                return Err(fail(INPUT, "ragged rows"));
            }
            let x: Vec<f64> = table.rows.iter().map(|r| r[a]).collect();
            let y: Vec<f64> = table.rows.iter().map(|r| r[b]).collect();
            let mut v =
                serde_json::to_value(wilcoxon_signed_rank(&x, &y).map_err(metrics_failure)?).expect("serializable");
            v["conditions"] = json!([names[a], names[b]]);
            v
        }
    };
    out["test"] = json!(match test {
        StatTest::Friedman => "friedman",
        StatTest::Wilcoxon => "wilcoxon",
        StatTest::Anova => "anova",
    });
    out["n"] = json!(table.rows.len());
    Ok(out)
}

fn position(names: &[String], wanted: &str) -> CliResult<usize> {
    names.iter().position(|n| n == wanted).ok_or_else(|| fail(INPUT, format!("no column named {wanted:?}")))
}
