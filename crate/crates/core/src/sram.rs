//! Behavioral single-port SRAM macro: an ideal word array that performs one
//! read or one write per call, with a per-cycle access log.

use thiserror::Error;

use crate::model::{word_mask, Addr, SimConfig, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SramError {
    #[error("address {addr:#x} out of range (array has {depth} words)")]
    AddrOutOfRange { addr: Addr, depth: usize },
    #[error("data {data:#x} does not fit in {width} bits")]
    DataTooWide { data: Word, width: u32 },
    #[error("memory image is {got} bytes, expected {expected}")]
    ImageSize { got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SramMacro {
    width: u32,
    words: Vec<Word>,
    /// Access count per external cycle; the last entry is the open cycle.
    access_log: Vec<u32>,
}

impl SramMacro {
    pub fn new(cfg: &SimConfig) -> Self {
        SramMacro::filled(cfg.word_width, cfg.array_words, cfg.init_fill)
    }

    pub fn filled(width: u32, depth: usize, fill: Word) -> Self {
        SramMacro {
            width,
            words: vec![fill & word_mask(width); depth],
            access_log: Vec::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Opens a new entry in the access log.
    pub fn begin_cycle(&mut self) {
        self.access_log.push(0);
    }

    pub fn access_log(&self) -> &[u32] {
        &self.access_log
    }

    pub fn total_accesses(&self) -> u64 {
        self.access_log.iter().map(|&n| n as u64).sum()
    }

    pub fn check_addr(&self, addr: Addr) -> Result<usize, SramError> {
        usize::try_from(addr)
            .ok()
            .filter(|&a| a < self.words.len())
            .ok_or(SramError::AddrOutOfRange {
                addr,
                depth: self.words.len(),
            })
    }

    pub fn check_data(&self, data: Word) -> Result<(), SramError> {
        if data & !word_mask(self.width) == 0 {
            Ok(())
        } else {
            Err(SramError::DataTooWide {
                data,
                width: self.width,
            })
        }
    }

    /// Reads without touching the access log.
    pub fn peek(&self, addr: Addr) -> Result<Word, SramError> {
        Ok(self.words[self.check_addr(addr)?])
    }

    pub fn read(&mut self, addr: Addr) -> Result<Word, SramError> {
        let i = self.check_addr(addr)?;
        self.log_access();
        Ok(self.words[i])
    }

    pub fn write(&mut self, addr: Addr, data: Word) -> Result<(), SramError> {
        let i = self.check_addr(addr)?;
        self.check_data(data)?;
        self.log_access();
        self.words[i] = data;
        Ok(())
    }

    fn log_access(&mut self) {
        match self.access_log.last_mut() {
            Some(n) => *n += 1,
            None => self.access_log.push(1),
        }
    }

    fn bytes_per_word(&self) -> usize {
        self.width.div_ceil(8) as usize
    }

    /// Flat little-endian image, each word padded to whole bytes.
    pub fn dump_image(&self) -> Vec<u8> {
        let bpw = self.bytes_per_word();
        let mut out = Vec::with_capacity(bpw * self.words.len());
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes()[..bpw]);
        }
        out
    }

    /// Replaces the array contents from an image produced by [`dump_image`].
    ///
    /// [`dump_image`]: SramMacro::dump_image
    pub fn load_image(&mut self, image: &[u8]) -> Result<(), SramError> {
        let bpw = self.bytes_per_word();
        let expected = bpw * self.words.len();
        if image.len() != expected {
            return Err(SramError::ImageSize {
                got: image.len(),
                expected,
            });
        }
        let mut words = Vec::with_capacity(self.words.len());
        for chunk in image.chunks_exact(bpw) {
            let mut buf = [0u8; 8];
            buf[..bpw].copy_from_slice(chunk);
            let w = Word::from_le_bytes(buf);
            self.check_data(w)?;
            words.push(w);
        }
        self.words = words;
        Ok(())
    }
}
