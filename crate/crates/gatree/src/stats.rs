//! Per-generation statistics as CSV.
//!
//! Header: `generation,best_fitness,avg_fitness,best_size,train_acc,test_acc`.
//! Reals use the shortest text that parses back to the same `f64`;
//! `test_acc` is empty when no test set was given. Cross-validation output
//! prepends a `fold` column.

use gatree_core::GenerationStats;

pub const HEADER: [&str; 6] = ["generation", "best_fitness", "avg_fitness", "best_size", "train_acc", "test_acc"];

fn fields(s: &GenerationStats) -> [String; 6] {
    [
        s.generation.to_string(),
        s.best_fitness.to_string(),
        s.avg_fitness.to_string(),
        s.best_size.to_string(),
        s.best_train_accuracy.to_string(),
        s.test_accuracy.map(|a| a.to_string()).unwrap_or_default(),
    ]
}

pub fn write_history(history: &[GenerationStats]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for s in history {
        w.write_record(fields(s)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn write_fold_histories(histories: &[Vec<GenerationStats>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("fold").chain(HEADER)).expect("in-memory write");
    for (fold, history) in histories.iter().enumerate() {
        for s in history {
            let f = fields(s);
            w.write_record(std::iter::once(fold.to_string()).chain(f)).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}
