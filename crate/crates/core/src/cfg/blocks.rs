use crate::classify::{ClassifiedProgram, ClassifiedStmt, StatementType};

use super::{BasicBlock, BlockId, BlockKind, Branch, Section, Successor};

/// Splits the program into basic blocks. Block 0 is the entry block and the
/// last block is the exit block; ids otherwise follow statement order.
pub fn build_basic_blocks(program: &ClassifiedProgram) -> Vec<BasicBlock> {
    let mut b = Builder {
        stmts: &program.stmts,
        pos: 0,
        blocks: Vec::new(),
        pending: Vec::new(),
        open: None,
        section: Section::Global,
    };
    let entry = b.new_block(BlockKind::Entry);
    debug_assert_eq!(entry, 0);
    b.region(true);
    debug_assert_eq!(b.pos, b.stmts.len(), "classified program left unconsumed statements");
    b.new_block(BlockKind::Exit);
    b.blocks
}

struct Builder<'p> {
    stmts: &'p [ClassifiedStmt],
    pos: usize,
    blocks: Vec<BasicBlock>,
    /// Blocks whose control flow continues into the next block opened.
    pending: Vec<(BlockId, Option<Branch>)>,
    /// Block still accepting statements; when set, `pending == [(open, None)]`.
    open: Option<BlockId>,
    section: Section,
}

impl Builder<'_> {
    fn peek(&self) -> Option<&ClassifiedStmt> {
        self.stmts.get(self.pos)
    }

    fn next(&mut self) -> ClassifiedStmt {
        let s = self.stmts[self.pos].clone();
        self.pos += 1;
        s
    }

    fn new_block(&mut self, kind: BlockKind) -> BlockId {
        let id = self.blocks.len();
        for (from, branch) in self.pending.drain(..) {
            self.blocks[from].successors.push(Successor { to: id, branch });
        }
        self.blocks.push(BasicBlock {
            id,
            kind,
            stmts: Vec::new(),
            section: self.section,
            successors: Vec::new(),
        });
        self.pending.push((id, None));
        self.open = None;
        id
    }

    /// Collapses pending flow into a single unlabelled block, adding an empty join if needed.
    fn seal(&mut self) -> BlockId {
        match self.pending.as_slice() {
            [(id, None)] => {
                let id = *id;
                self.open = None;
                id
            }
            _ => self.new_block(BlockKind::Ordinary),
        }
    }

    fn append_plain(&mut self, stmt: ClassifiedStmt) -> BlockId {
        let id = match self.open {
            Some(id) if self.blocks[id].kind == BlockKind::Ordinary => id,
            Some(id) if self.blocks[id].kind == BlockKind::FinalizeBlock && stmt.ty == StatementType::End => id,
            _ => self.new_block(BlockKind::Ordinary),
        };
        self.blocks[id].stmts.push(stmt);
        self.open = Some(id);
        id
    }

    /// Consumes statements until an `else`/`endif` marker (left unconsumed) or the end.
    fn region(&mut self, top_level: bool) {
        while let Some(stmt) = self.peek() {
            match stmt.ty {
                StatementType::Else | StatementType::EndIf => {
                    debug_assert!(!top_level, "unbalanced markers at top level");
                    return;
                }
                StatementType::ParallelIf => {
                    debug_assert!(top_level, "classifier rejects nested process sections");
                    self.parallel_region();
                }
                StatementType::OrdinaryIf => self.conditional(),
                StatementType::Send => {
                    let stmt = self.next();
                    let id = match self.open {
                        Some(id) if self.blocks[id].kind == BlockKind::Ordinary => {
                            self.blocks[id].kind = BlockKind::SendBlock;
                            id
                        }
                        _ => self.new_block(BlockKind::SendBlock),
                    };
                    self.blocks[id].stmts.push(stmt);
                    self.open = None;
                }
                StatementType::Recv => {
                    let stmt = self.next();
                    let id = self.new_block(BlockKind::RecvBlock);
                    self.blocks[id].stmts.push(stmt);
                }
                StatementType::Finalize => {
                    let stmt = self.next();
                    let id = self.new_block(BlockKind::FinalizeBlock);
                    self.blocks[id].stmts.push(stmt);
                    self.open = Some(id);
                }
                StatementType::Assign
                | StatementType::Init
                | StatementType::Rank
                | StatementType::Size
                | StatementType::End => {
                    let stmt = self.next();
                    self.append_plain(stmt);
                }
            }
        }
    }

    fn conditional(&mut self) {
        let cond = self.next();
        let cond_block = self.append_plain(cond);
        self.open = None;

        self.pending = vec![(cond_block, Some(Branch::Then))];
        self.region(false);
        let mut exits = std::mem::take(&mut self.pending);
        self.open = None;

        let marker = self.next();
        self.pending = vec![(cond_block, Some(Branch::Else))];
        if marker.ty == StatementType::Else {
            self.region(false);
            let end = self.next();
            debug_assert_eq!(end.ty, StatementType::EndIf);
        } else {
            debug_assert_eq!(marker.ty, StatementType::EndIf);
        }
        exits.append(&mut self.pending);
        self.pending = exits;
        self.open = None;
    }

    /// A maximal run of consecutive process sections sharing one fan-out point.
    fn parallel_region(&mut self) {
        let anchor = self.seal();
        let mut fan_in = Vec::new();
        while self.peek().is_some_and(|s| s.ty == StatementType::ParallelIf) {
            let header = self.next();
            let process = header.process.expect("parallel if carries its process id");
            self.section = Section::Process(process);
            self.pending = vec![(anchor, None)];
            self.open = None;
            let first_block = self.blocks.len();
            self.region(false);
            let end = self.next();
            debug_assert_eq!(end.ty, StatementType::EndIf);
            if self.blocks.len() == first_block {
                // empty section body
                self.new_block(BlockKind::Ordinary);
            }
            if self.pending.iter().any(|(_, branch)| branch.is_some()) {
                self.seal();
            }
            fan_in.append(&mut self.pending);
        }
        self.section = Section::Global;
        self.pending = fan_in;
        self.open = None;
    }
}
