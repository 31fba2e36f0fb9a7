//! Run-length encoded words used for large factor sets.
//!
//! Encoding: for each maximal run, the letter byte followed by the run
//! length as an unsigned LEB128 varint. Maximal runs make the encoding
//! canonical, so byte equality is word equality.

pub(crate) type Runs = Vec<(u8, u32)>;

pub(crate) type Encoded = Box<[u8]>;

pub(crate) fn push_run(runs: &mut Runs, letter: u8, len: u32) {
    if len == 0 {
        return;
    }
    match runs.last_mut() {
        Some(last) if last.0 == letter => last.1 += len,
        _ => runs.push((letter, len)),
    }
}

pub(crate) fn runs_of(letters: &[u8]) -> Runs {
    let mut runs = Runs::new();
    for &x in letters {
        push_run(&mut runs, x, 1);
    }
    runs
}

pub(crate) fn encode_into(runs: &[(u8, u32)], out: &mut Vec<u8>) {
    for &(letter, mut len) in runs {
        out.push(letter);
        loop {
            let byte = (len & 0x7f) as u8;
            len >>= 7;
            if len == 0 {
                out.push(byte);
                break;
            }
            out.push(byte | 0x80);
        }
    }
}

pub(crate) fn encode(runs: &[(u8, u32)]) -> Encoded {
    let mut out = Vec::with_capacity(runs.len() * 2);
    encode_into(runs, &mut out);
    out.into_boxed_slice()
}

pub(crate) fn encode_letters(letters: &[u8]) -> Encoded {
    encode(&runs_of(letters))
}

pub(crate) fn decode_runs(enc: &[u8]) -> Runs {
    let mut runs = Runs::new();
    let mut i = 0;
    while i < enc.len() {
        let letter = enc[i];
        i += 1;
        let mut len = 0u32;
        let mut shift = 0;
        loop {
            let b = enc[i];
            i += 1;
            len |= ((b & 0x7f) as u32) << shift;
            shift += 7;
            if b & 0x80 == 0 {
                break;
            }
        }
        runs.push((letter, len));
    }
    runs
}

pub(crate) fn decode_letters(enc: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    for (letter, len) in decode_runs(enc) {
        out.extend(std::iter::repeat_n(letter, len as usize));
    }
    out
}

/// Pushes the encoding of every length-`n` window of `runs`.
pub(crate) fn windows_into(runs: &[(u8, u32)], n: usize, out: &mut Vec<Encoded>) {
    let total: usize = runs.iter().map(|r| r.1 as usize).sum();
    if n == 0 || total < n {
        return;
    }
    let mut buf = Vec::new();
    let mut window = Runs::new();
    let (mut i, mut off) = (0usize, 0u32);
    for _ in 0..=(total - n) {
        window.clear();
        let mut need = n as u32;
        let (mut j, mut o) = (i, off);
        while need > 0 {
            let (letter, len) = runs[j];
            let take = (len - o).min(need);
            window.push((letter, take));
            need -= take;
            j += 1;
            o = 0;
        }
        buf.clear();
        encode_into(&window, &mut buf);
        out.push(buf.as_slice().into());
        off += 1;
        if off == runs[i].1 {
            i += 1;
            off = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn encoding_round_trips(letters in proptest::collection::vec(0u8..3, 0..400)) {
            let enc = encode_letters(&letters);
            prop_assert_eq!(decode_letters(&enc), letters);
        }

        #[test]
        fn windows_match_plain_slices(letters in proptest::collection::vec(0u8..2, 1..60), n in 1usize..10) {
            let mut got = Vec::new();
            windows_into(&runs_of(&letters), n, &mut got);
            let expect: Vec<Encoded> = letters.windows(n).map(encode_letters).collect();
            prop_assert_eq!(got, expect);
        }
    }

    #[test]
    fn long_runs_use_varints() {
        let enc = encode(&[(0, 300), (1, 1)]);
        assert_eq!(enc.len(), 5);
        assert_eq!(decode_runs(&enc), vec![(0, 300), (1, 1)]);
    }
}
